//! On-disk cache for field tables and Gauss tables.
//!
//! A field blob stores the exponent table only; the log, Zech and trace tables
//! are rebuilt from it on load. Gauss blobs store little-endian `f64` pairs.
//! A blob whose header does not match the request is reported as corrupt,
//! never silently reused.

use num_complex::Complex64;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::chars::{AddChar, CharTable, GaussTable};
use crate::error::{Error, Result};
use crate::ff::{FieldDesc, DEFAULT_TABLE_LIMIT};
use crate::moments::{Level, Source};

const FIELD_MAGIC: &[u8; 4] = b"G2HF";
const GAUSS_MAGIC: &[u8; 4] = b"G2HG";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
    table_limit: u64,
}

struct Reader<'a> {
    buf: &'a [u8],
    what: &'a str,
}

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        if self.buf.len() < k {
            return Err(Error::CorruptCache(format!("{}: truncated", self.what)));
        }
        let (head, tail) = self.buf.split_at(k);
        self.buf = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn expect(&mut self, what: &str, want: u32) -> Result<()> {
        let got = self.u32()?;
        if got != want {
            return Err(Error::CorruptCache(format!(
                "{}: {what} is {got}, expected {want}",
                self.what
            )));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::CorruptCache(format!("{}: trailing bytes", self.what)))
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache {
            dir: dir.into(),
            table_limit: DEFAULT_TABLE_LIMIT,
        }
    }

    pub fn with_table_limit(mut self, limit: u64) -> Cache {
        self.table_limit = limit;
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn field_path(&self, p: u32, n: u32) -> PathBuf {
        self.dir.join(format!("field-p{p}-n{n}.bin"))
    }

    pub fn gauss_path(&self, p: u32, n: u32, scale: u32) -> PathBuf {
        self.dir.join(format!("gauss-p{p}-n{n}-l{scale}.bin"))
    }

    /// Loads `GF(p^n)` from the cache, building and storing it on a miss.
    pub fn field(&self, p: u32, n: u32) -> Result<Arc<FieldDesc>> {
        let path = self.field_path(p, n);
        if path.exists() {
            return Ok(Arc::new(self.load_field(&path, p, n)?));
        }
        let field = FieldDesc::build_with_limit(p, n, self.table_limit)?;
        fs::create_dir_all(&self.dir)?;
        write_atomic(&path, &encode_field(&field))?;
        Ok(Arc::new(field))
    }

    fn load_field(&self, path: &Path, p: u32, n: u32) -> Result<FieldDesc> {
        let q = crate::ff::field_order(p, n).ok_or(Error::FieldTooLarge {
            q: u64::MAX,
            limit: self.table_limit,
        })?;
        if q > self.table_limit {
            return Err(Error::FieldTooLarge {
                q,
                limit: self.table_limit,
            });
        }
        let bytes = fs::read(path)?;
        let what = path.display().to_string();
        let mut r = Reader { buf: &bytes, what: &what };
        if r.take(4)? != FIELD_MAGIC {
            return Err(Error::CorruptCache(format!("{what}: bad magic")));
        }
        r.expect("version", FORMAT_VERSION)?;
        r.expect("p", p)?;
        r.expect("n", n)?;
        r.expect("q", q as u32)?;
        let modulus = (0..=n).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let generator = r.u32()?;
        let exp = (1..q).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        r.finish()?;
        let mut seen = vec![false; q as usize];
        for &c in &exp {
            if c == 0 || c as u64 >= q || std::mem::replace(&mut seen[c as usize], true) {
                return Err(Error::CorruptCache(format!("{what}: exponent table is not a permutation")));
            }
        }
        if exp[0] != 1 || (q > 2 && exp[1] != generator) || modulus.last() != Some(&1) {
            return Err(Error::CorruptCache(format!("{what}: inconsistent generator or modulus")));
        }
        Ok(FieldDesc::from_exp_table(p, n, modulus, generator, exp))
    }

    /// Loads the Gauss table of `(table, psi)`, computing and storing it on a miss.
    pub fn gauss(&self, table: &CharTable, psi: AddChar) -> Result<GaussTable> {
        let f = table.field();
        let path = self.gauss_path(f.p(), f.n(), psi.scale_exponent());
        if path.exists() {
            return load_gauss(&path, f.p(), f.n(), psi.scale_exponent(), f.unit_order());
        }
        let g = GaussTable::compute(table, psi)?;
        fs::create_dir_all(&self.dir)?;
        write_atomic(&path, &encode_gauss(&g))?;
        Ok(g)
    }
}

impl Source for Cache {
    fn field(&mut self, p: u32, n: u32) -> Result<Arc<FieldDesc>> {
        Cache::field(self, p, n)
    }

    fn level(&mut self, field: Arc<FieldDesc>, psi: AddChar) -> Result<Level> {
        let table = CharTable::new(field);
        let gauss = self.gauss(&table, psi)?;
        Ok(Level { table, psi, gauss })
    }
}

fn encode_field(f: &FieldDesc) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 * (f.q() as usize + 8));
    out.extend_from_slice(FIELD_MAGIC);
    for v in [FORMAT_VERSION, f.p(), f.n(), f.q()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &c in f.modulus() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.extend_from_slice(&f.generator_code().to_le_bytes());
    for &c in f.exp_table() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

fn encode_gauss(g: &GaussTable) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * g.len() + 24);
    out.extend_from_slice(GAUSS_MAGIC);
    for v in [FORMAT_VERSION, g.p(), g.n(), g.scale_exponent(), g.len() as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for z in g.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn load_gauss(path: &Path, p: u32, n: u32, scale: u32, len: u32) -> Result<GaussTable> {
    let bytes = fs::read(path)?;
    let what = path.display().to_string();
    let mut r = Reader { buf: &bytes, what: &what };
    if r.take(4)? != GAUSS_MAGIC {
        return Err(Error::CorruptCache(format!("{what}: bad magic")));
    }
    r.expect("version", FORMAT_VERSION)?;
    r.expect("p", p)?;
    r.expect("n", n)?;
    r.expect("scale", scale)?;
    r.expect("length", len)?;
    let values = (0..len)
        .map(|_| Ok(Complex64::new(r.f64()?, r.f64()?)))
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(GaussTable::from_parts(p, n, scale, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::build_field;

    #[test]
    fn field_round_trip_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        for (p, n) in [(3, 1), (5, 2), (3, 5), (17, 2)] {
            let cold = cache.field(p, n).unwrap();
            assert!(cache.field_path(p, n).exists());
            let warm = cache.field(p, n).unwrap();
            let fresh = build_field(p, n).unwrap();
            assert_eq!(format!("{:?}", *warm), format!("{fresh:?}"));
            for x in fresh.units().step_by(7) {
                for y in fresh.units().step_by(11) {
                    assert_eq!(warm.add(x, y), fresh.add(x, y));
                    assert_eq!(cold.add(x, y), fresh.add(x, y));
                }
                assert_eq!(warm.trace_to_prime(x), fresh.trace_to_prime(x));
            }
        }
    }

    #[test]
    fn gauss_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let table = CharTable::new(cache.field(7, 2).unwrap());
        let psi = AddChar::scaled(table.field().pow_gen(3)).unwrap();
        let cold = cache.gauss(&table, psi).unwrap();
        let warm = cache.gauss(&table, psi).unwrap();
        let fresh = GaussTable::compute(&table, psi).unwrap();
        for ((a, b), c) in cold.values().iter().zip(warm.values()).zip(fresh.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), c.im.to_bits());
        }
        assert!(warm.matches(table.field(), psi));
    }

    #[test]
    fn corrupt_blobs_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.field(5, 2).unwrap();
        let path = cache.field_path(5, 2);
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 3);
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(cache.field(5, 2), Err(Error::CorruptCache(_))));

        // a blob for another field under this name
        fs::copy(cache.field_path(5, 2), cache.field_path(7, 2)).ok();
        cache.field(3, 2).unwrap();
        fs::copy(cache.field_path(3, 2), cache.field_path(5, 2)).unwrap();
        assert!(matches!(cache.field(5, 2), Err(Error::CorruptCache(_))));

        // duplicated exponent entries
        fs::remove_file(cache.field_path(5, 2)).unwrap();
        cache.field(5, 2).unwrap();
        let mut bytes = fs::read(cache.field_path(5, 2)).unwrap();
        let len = bytes.len();
        let last: [u8; 4] = bytes[len - 8..len - 4].try_into().unwrap();
        bytes[len - 4..].copy_from_slice(&last);
        fs::write(cache.field_path(5, 2), &bytes).unwrap();
        assert!(matches!(cache.field(5, 2), Err(Error::CorruptCache(_))));
    }

    #[test]
    fn limit_applies_to_cached_fields() {
        let dir = tempfile::tempdir().unwrap();
        Cache::new(dir.path()).field(3, 5).unwrap();
        let small = Cache::new(dir.path()).with_table_limit(100);
        assert!(matches!(small.field(3, 5), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn cached_moments_match_cold_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mut cache = Cache::new(dir.path());
        let fresh = crate::moments::moment_sequence(7, 1, 1, 4, [1, 2]).unwrap();
        for _ in 0..2 {
            let cached =
                crate::moments::moment_sequence_with(7, 1, 1, 4, [1, 2], &mut cache).unwrap();
            for (a, b) in fresh.reports.iter().zip(&cached.reports) {
                assert_eq!(a.value_excl.to_bits(), b.value_excl.to_bits());
            }
        }
    }
}
