//! Table-driven arithmetic in `GF(p^n)` for odd `p`.
//!
//! Elements are represented by their discrete logarithm with respect to a
//! canonical generator. Multiplication is exponent addition, addition goes
//! through a Zech-logarithm table. Every canonical choice (modulus,
//! generator) is the smallest admissible candidate, so two builds of the
//! same field are identical on every machine.
//!
//! Polynomial *codes* identify elements independently of the generator: the
//! residue class of `c_0 + c_1 x + ... + c_{n-1} x^{n-1}` has code
//! `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`.

mod poly;
mod subfield;

pub use subfield::Embedding;

use crate::error::{Error, Result};

/// Default bound on `q` for building tables (`2^24` elements).
pub const DEFAULT_TABLE_LIMIT: u64 = 1 << 24;

const NONE: u32 = u32::MAX;

/// An element of a finite field: `ZERO` or `g^e` with `0 <= e < q - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(NONE);
    pub const ONE: FieldElem = FieldElem(0);

    /// `g^e`; the exponent must already be reduced mod `q - 1`.
    #[inline]
    pub const fn from_exponent(e: u32) -> FieldElem {
        FieldElem(e)
    }

    #[inline]
    pub fn exponent(self) -> Option<u32> {
        (self.0 != NONE).then_some(self.0)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == NONE
    }
}

/// A finite field `GF(p^n)` together with its lookup tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldDesc {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    /// `exp[e]` = code of `g^e`
    exp: Vec<u32>,
    /// `log[code]` = exponent, `NONE` for code 0
    log: Vec<u32>,
    /// `g^zech[i] = 1 + g^i`, `NONE` where `1 + g^i = 0`
    zech: Vec<u32>,
    /// `trace[e]` = `Tr_{k/F_p}(g^e)` as a residue
    trace: Vec<u32>,
}

impl std::fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldDesc")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish_non_exhaustive()
    }
}

/// Builds `GF(p^n)` with the default table limit.
pub fn build_field(p: u32, n: u32) -> Result<FieldDesc> {
    FieldDesc::build(p, n)
}

/// `p^n`, or `None` on overflow of `u64`.
pub fn field_order(p: u32, n: u32) -> Option<u64> {
    (p as u64).checked_pow(n)
}

impl FieldDesc {
    pub fn build(p: u32, n: u32) -> Result<FieldDesc> {
        Self::build_with_limit(p, n, DEFAULT_TABLE_LIMIT)
    }

    pub fn build_with_limit(p: u32, n: u32, limit: u64) -> Result<FieldDesc> {
        if n == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !poly::is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        let q = field_order(p, n).unwrap_or(u64::MAX);
        let limit = limit.min(NONE as u64 - 1);
        if q > limit {
            return Err(Error::FieldTooLarge { q, limit });
        }
        let modulus = canonical_modulus(p, n);
        let generator = canonical_generator(p, n, q, &modulus);
        let exp = power_table(p, n, q as u32, &modulus, generator);
        Ok(Self::from_exp_table(p, n, modulus, generator, exp))
    }

    /// Derives log, Zech and trace tables from the power table.
    pub(crate) fn from_exp_table(
        p: u32,
        n: u32,
        modulus: Vec<u32>,
        generator: u32,
        exp: Vec<u32>,
    ) -> FieldDesc {
        let q = exp.len() as u32 + 1;
        let mut log = vec![NONE; q as usize];
        for (e, &c) in exp.iter().enumerate() {
            log[c as usize] = e as u32;
        }
        let zech = exp
            .iter()
            .map(|&c| {
                let d0 = c % p;
                let shifted = c - d0 + (d0 + 1) % p;
                log[shifted as usize]
            })
            .collect();
        let basis_traces = basis_traces(p, n, &modulus);
        let trace = exp
            .iter()
            .map(|&c| {
                let mut code = c;
                let mut acc = 0u64;
                for &t in &basis_traces {
                    acc += (code % p) as u64 * t as u64;
                    code /= p;
                }
                (acc % p as u64) as u32
            })
            .collect();
        FieldDesc {
            p,
            n,
            q,
            modulus,
            generator,
            exp,
            log,
            zech,
            trace,
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, `q - 1`.
    #[inline]
    pub fn unit_order(&self) -> u32 {
        self.q - 1
    }

    /// Monic modulus, coefficients low degree first (length `n + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Polynomial code of the canonical generator.
    pub fn generator_code(&self) -> u32 {
        self.generator
    }

    pub fn generator(&self) -> FieldElem {
        FieldElem(1)
    }

    pub(crate) fn exp_table(&self) -> &[u32] {
        &self.exp
    }

    /// `g^e` for any integer exponent.
    #[inline]
    pub fn pow_gen(&self, e: i64) -> FieldElem {
        FieldElem(e.rem_euclid(self.unit_order() as i64) as u32)
    }

    /// Exponent of `-1`, i.e. `(q - 1) / 2`.
    #[inline]
    pub fn half_order(&self) -> u32 {
        self.unit_order() / 2
    }

    pub fn minus_one(&self) -> FieldElem {
        FieldElem(self.half_order())
    }

    pub fn from_code(&self, code: u32) -> Result<FieldElem> {
        self.log
            .get(code as usize)
            .map(|&e| FieldElem(e))
            .ok_or_else(|| Error::InvalidArgument(format!("code {code} outside GF({})", self.q)))
    }

    #[inline]
    pub fn code(&self, x: FieldElem) -> u32 {
        match x.exponent() {
            None => 0,
            Some(e) => self.exp[e as usize],
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> FieldElem {
        let c = v.rem_euclid(self.p as i64) as u32;
        FieldElem(self.log[c as usize])
    }

    /// Polynomial coefficients of `x`, low degree first.
    pub fn coefficients(&self, x: FieldElem) -> Vec<u32> {
        let mut code = self.code(x);
        (0..self.n)
            .map(|_| {
                let d = code % self.p;
                code /= self.p;
                d
            })
            .collect()
    }

    /// Zech logarithm: `Some(z)` with `g^z = 1 + g^i`, `None` iff `1 + g^i = 0`.
    #[inline]
    pub fn zech(&self, i: u32) -> Option<u32> {
        let z = self.zech[i as usize];
        (z != NONE).then_some(z)
    }

    #[inline]
    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        match (x.exponent(), y.exponent()) {
            (Some(a), Some(b)) => FieldElem(add_mod(a, b, self.unit_order())),
            _ => FieldElem::ZERO,
        }
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem> {
        match x.exponent() {
            None => Err(Error::ZeroInverse),
            Some(0) => Ok(FieldElem::ONE),
            Some(e) => Ok(FieldElem(self.unit_order() - e)),
        }
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^k` for any integer `k`; `0^0 = 1`, `0^k = 0` for `k > 0`.
    pub fn pow(&self, x: FieldElem, k: i64) -> Result<FieldElem> {
        match x.exponent() {
            None if k == 0 => Ok(FieldElem::ONE),
            None if k > 0 => Ok(FieldElem::ZERO),
            None => Err(Error::ZeroInverse),
            Some(e) => {
                let m = self.unit_order() as i128;
                Ok(FieldElem((e as i128 * k as i128).rem_euclid(m) as u32))
            }
        }
    }

    #[inline]
    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        match (x.exponent(), y.exponent()) {
            (None, _) => y,
            (_, None) => x,
            (Some(i), Some(j)) => {
                let m = self.unit_order();
                let d = if j >= i { j - i } else { j + m - i };
                match self.zech[d as usize] {
                    NONE => FieldElem::ZERO,
                    z => FieldElem(add_mod(i, z, m)),
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, x: FieldElem) -> FieldElem {
        match x.exponent() {
            None => x,
            Some(e) => FieldElem(add_mod(e, self.half_order(), self.unit_order())),
        }
    }

    #[inline]
    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    /// Absolute trace `Tr_{k/F_p}(x)` as a residue in `0..p`.
    #[inline]
    pub fn trace_to_prime(&self, x: FieldElem) -> u32 {
        match x.exponent() {
            None => 0,
            Some(e) => self.trace[e as usize],
        }
    }

    pub fn is_square(&self, x: FieldElem) -> bool {
        x.exponent().is_none_or(|e| e % 2 == 0)
    }

    /// All nonzero elements, in exponent order.
    pub fn units(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.unit_order()).map(FieldElem)
    }

    /// Multiplicative order of `x` (zero has none).
    pub fn order_of(&self, x: FieldElem) -> Option<u32> {
        let e = x.exponent()? as u64;
        let m = self.unit_order() as u64;
        Some((m / gcd(e, m)) as u32)
    }

    /// Approximate table memory in bytes.
    pub fn table_bytes(&self) -> usize {
        4 * (self.exp.len() + self.log.len() + self.zech.len() + self.trace.len())
    }
}

#[inline]
fn add_mod(a: u32, b: u32, m: u32) -> u32 {
    let s = a as u64 + b as u64;
    let m = m as u64;
    (if s >= m { s - m } else { s }) as u32
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

fn decode(code: u64, p: u64, n: usize) -> Vec<u64> {
    let mut c = code;
    (0..n)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

/// Smallest monic irreducible of degree `n`, comparing `(c_0, c_1, ...)`
/// lexicographically.
fn canonical_modulus(p: u32, n: u32) -> Vec<u32> {
    let p64 = p as u64;
    let n = n as usize;
    let count = p64.pow(n as u32);
    for k in 0..count {
        // c_0 is the most significant digit of k, c_{n-1} the least
        let mut coeffs = vec![0u64; n + 1];
        let mut rest = k;
        for i in (0..n).rev() {
            coeffs[i] = rest % p64;
            rest /= p64;
        }
        coeffs[n] = 1;
        if n > 1 && coeffs[0] == 0 {
            continue;
        }
        if poly::is_irreducible(&coeffs, p64) {
            return coeffs.into_iter().map(|c| c as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn canonical_generator(p: u32, n: u32, q: u64, modulus: &[u32]) -> u32 {
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    let order = q - 1;
    let factors = poly::prime_factors(order);
    for code in 1..q {
        let mut x = decode(code, p64, n as usize);
        poly::trim(&mut x);
        let generates = factors
            .iter()
            .all(|&r| poly::powmod(&x, (order / r) as u128, &m, p64) != vec![1]);
        if generates {
            return code as u32;
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

fn encode(coeffs: &[u64], p: u64) -> u32 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

fn power_table(p: u32, n: u32, q: u32, modulus: &[u32], generator: u32) -> Vec<u32> {
    let len = (q - 1) as usize;
    let mut exp = Vec::with_capacity(len);
    if n == 1 {
        let (p, g) = (p as u64, generator as u64);
        let mut cur = 1u64;
        for _ in 0..len {
            exp.push(cur as u32);
            cur = cur * g % p;
        }
        return exp;
    }
    let p64 = p as u64;
    let n = n as usize;
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let g = decode(generator as u64, p64, n);
    let mut cur = vec![0u64; n];
    cur[0] = 1;
    let mut prod = vec![0u64; 2 * n - 1];
    for _ in 0..len {
        exp.push(encode(&cur, p64));
        prod.iter_mut().for_each(|c| *c = 0);
        for (i, &a) in cur.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in g.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p64;
            }
        }
        // reduce by the monic modulus from the top down
        for d in (n..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &mi) in m.iter().enumerate().take(n) {
                let idx = d - n + i;
                prod[idx] = (prod[idx] + (p64 - c) * mi) % p64;
            }
        }
        cur.copy_from_slice(&prod[..n]);
    }
    exp
}

/// `Tr(x^j)` for `j < n`, as residues mod `p`.
fn basis_traces(p: u32, n: u32, modulus: &[u32]) -> Vec<u32> {
    if n == 1 {
        return vec![1];
    }
    let p64 = p as u64;
    let m: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    (0..n as usize)
        .map(|j| {
            let mut y: Vec<u64> = vec![0; j + 1];
            y[j] = 1;
            let mut y = poly::rem(&y, &m, p64);
            let mut acc = vec![0u64; n as usize];
            for _ in 0..n {
                for (i, &c) in y.iter().enumerate() {
                    acc[i] = (acc[i] + c) % p64;
                }
                y = poly::powmod(&y, p64 as u128, &m, p64);
            }
            debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace must be a constant");
            acc[0] as u32
        })
        .collect()
}

/// Field element encoded by explicit polynomial arithmetic, used to check
/// the tables independently of any lookup.
#[cfg(test)]
pub(crate) fn poly_add_one_check(field: &FieldDesc, e: u32) -> u32 {
    let m: Vec<u64> = field.modulus.iter().map(|&c| c as u64).collect();
    let p = field.p as u64;
    let mut g = decode(field.generator as u64, p, field.n as usize);
    poly::trim(&mut g);
    let mut x = poly::powmod(&g, e as u128, &m, p);
    if x.is_empty() {
        x.push(0);
    }
    x[0] = (x[0] + 1) % p;
    poly::trim(&mut x);
    x.resize(field.n as usize, 0);
    encode(&x, p)
}
