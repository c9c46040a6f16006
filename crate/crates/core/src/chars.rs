//! Multiplicative and additive characters, Gauss sums and the full Gauss
//! table of a field.
//!
//! With `g` the canonical generator, the multiplicative character of index
//! `c` is `chi_c(g^m) = exp(2 pi i c m / (q - 1))`, and the additive
//! character with scale `lambda` is `psi_lambda(x) = exp(2 pi i Tr(lambda x) / p)`.
//! All values come from two root-of-unity tables built once per field.

use num_complex::Complex64;
use std::io::Write;
use std::sync::Arc;

use crate::dft::{self, Sign};
use crate::error::{Error, Result};
use crate::ff::{Embedding, FieldDesc, FieldElem, DEFAULT_TABLE_LIMIT};
use crate::sum::ComplexSum;

/// Multiplicative character of `k*`, identified by its index mod `q - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MulChar {
    index: u32,
    modulus: u32,
}

impl MulChar {
    pub fn new(index: i64, modulus: u32) -> MulChar {
        MulChar {
            index: index.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn is_trivial(self) -> bool {
        self.index == 0
    }

    /// `chi-bar`
    pub fn conj(self) -> MulChar {
        MulChar::new(-(self.index as i64), self.modulus)
    }

    pub fn times(self, other: MulChar) -> MulChar {
        debug_assert_eq!(self.modulus, other.modulus);
        MulChar::new(self.index as i64 + other.index as i64, self.modulus)
    }

    pub fn is_quadratic(self) -> bool {
        self.index as u64 * 2 == self.modulus as u64
    }

    /// `chi(-1) = (-1)^index`, since `-1 = g^((q-1)/2)`.
    pub fn at_minus_one(self) -> f64 {
        if self.index % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Additive character `x -> psi_0(scale * x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AddChar {
    scale: FieldElem,
}

impl AddChar {
    /// The canonical character `psi_0(x) = exp(2 pi i Tr(x) / p)`.
    pub const BASE: AddChar = AddChar {
        scale: FieldElem::ONE,
    };

    pub fn scaled(scale: FieldElem) -> Result<AddChar> {
        if scale.is_zero() {
            return Err(Error::InvalidArgument(
                "additive character scale must be nonzero".into(),
            ));
        }
        Ok(AddChar { scale })
    }

    pub fn scale(self) -> FieldElem {
        self.scale
    }

    /// Exponent of the scale with respect to the canonical generator.
    pub fn scale_exponent(self) -> u32 {
        self.scale.exponent().expect("scale is nonzero")
    }
}

/// Root-of-unity tables of orders `q - 1` and `p` for one field.
#[derive(Clone, Debug)]
pub struct CharTable {
    field: Arc<FieldDesc>,
    unit_roots: Vec<Complex64>,
    prime_roots: Vec<Complex64>,
}

impl CharTable {
    pub fn new(field: Arc<FieldDesc>) -> CharTable {
        let unit_roots = dft::roots_of_unity(field.unit_order() as usize);
        let prime_roots = dft::roots_of_unity(field.p() as usize);
        CharTable {
            field,
            unit_roots,
            prime_roots,
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn mul_char(&self, index: i64) -> MulChar {
        MulChar::new(index, self.field.unit_order())
    }

    pub fn trivial(&self) -> MulChar {
        self.mul_char(0)
    }

    /// `lambda_2`, the unique character of order 2.
    pub fn quadratic(&self) -> MulChar {
        self.mul_char(self.field.half_order() as i64)
    }

    pub fn characters(&self) -> impl Iterator<Item = MulChar> + '_ {
        (0..self.field.unit_order() as i64).map(|c| self.mul_char(c))
    }

    /// `exp(2 pi i k / (q - 1))`
    #[inline]
    pub fn unit_root(&self, k: u64) -> Complex64 {
        self.unit_roots[(k % self.unit_roots.len() as u64) as usize]
    }

    /// `exp(2 pi i k / p)`
    #[inline]
    pub fn prime_root(&self, k: u64) -> Complex64 {
        self.prime_roots[(k % self.prime_roots.len() as u64) as usize]
    }

    /// `chi(g^e)` without the zero check.
    #[inline]
    pub fn eval_mul_exp(&self, chi: MulChar, e: u32) -> Complex64 {
        self.unit_root(chi.index as u64 * e as u64)
    }

    pub fn eval_mul(&self, chi: MulChar, x: FieldElem) -> Result<Complex64> {
        x.exponent()
            .map(|e| self.eval_mul_exp(chi, e))
            .ok_or(Error::ZeroArgumentToMulChar)
    }

    #[inline]
    pub fn eval_add(&self, psi: AddChar, x: FieldElem) -> Complex64 {
        let y = self.field.mul(psi.scale, x);
        self.prime_roots[self.field.trace_to_prime(y) as usize]
    }

    /// `psi(g^e)`
    #[inline]
    pub fn eval_add_exp(&self, psi: AddChar, e: u32) -> Complex64 {
        self.eval_add(psi, FieldElem::from_exponent(e))
    }

    /// `g(chi, psi) = sum_{x in k*} chi(x) psi(x)` by direct summation.
    pub fn gauss_sum(&self, chi: MulChar, psi: AddChar) -> Complex64 {
        gauss_sum_with(
            &self.field,
            |x| self.eval_mul(chi, x).expect("units only"),
            |x| self.eval_add(psi, x),
        )
    }

    /// `A_{psi,k} = -g(lambda_2, psi)`.
    pub fn a_norm(&self, psi: AddChar) -> Complex64 {
        -self.gauss_sum(self.quadratic(), psi)
    }

    /// Whether `A_{psi_lambda} = lambda_2(lambda) A_psi` holds numerically.
    pub fn scale_relation_check(&self, lambda: FieldElem) -> bool {
        let Ok(scaled) = AddChar::scaled(lambda) else {
            return false;
        };
        let lhs = self.a_norm(scaled);
        let rhs = self.eval_mul(self.quadratic(), lambda).expect("nonzero") * self.a_norm(AddChar::BASE);
        (lhs - rhs).norm() <= 1e-9 * (self.field.q() as f64).sqrt()
    }
}

/// Direct compensated Gauss sum for arbitrary character functions on `k*`.
pub fn gauss_sum_with(
    field: &FieldDesc,
    chi: impl Fn(FieldElem) -> Complex64,
    psi: impl Fn(FieldElem) -> Complex64,
) -> Complex64 {
    let mut acc = ComplexSum::new();
    for x in field.units() {
        acc.add(chi(x) * psi(x));
    }
    acc.value()
}

/// `chi_m = chi o Nm`, a character of the big field of an embedding.
#[derive(Clone, Copy, Debug)]
pub struct ExtendedMulChar<'a> {
    base: &'a CharTable,
    chi: MulChar,
    embedding: &'a Embedding,
}

impl ExtendedMulChar<'_> {
    pub fn eval(&self, x: FieldElem) -> Result<Complex64> {
        if x.is_zero() {
            return Err(Error::ZeroArgumentToMulChar);
        }
        self.base.eval_mul(self.chi, self.embedding.norm(x))
    }
}

/// `psi_m = psi o Tr`, a character of the big field of an embedding.
#[derive(Clone, Copy, Debug)]
pub struct ExtendedAddChar<'a> {
    base: &'a CharTable,
    psi: AddChar,
    embedding: &'a Embedding,
}

impl ExtendedAddChar<'_> {
    pub fn eval(&self, x: FieldElem) -> Complex64 {
        self.base.eval_add(self.psi, self.embedding.trace(x))
    }
}

fn check_base(base: &CharTable, embedding: &Embedding) -> Result<()> {
    let (f, s) = (base.field(), embedding.small());
    if f.p() != s.p() || f.n() != s.n() {
        return Err(Error::NotASubfield {
            p: f.p(),
            small: f.n(),
            big: embedding.big().n(),
        });
    }
    Ok(())
}

pub fn extend_mul<'a>(
    base: &'a CharTable,
    chi: MulChar,
    embedding: &'a Embedding,
) -> Result<ExtendedMulChar<'a>> {
    check_base(base, embedding)?;
    Ok(ExtendedMulChar {
        base,
        chi,
        embedding,
    })
}

pub fn extend_add<'a>(
    base: &'a CharTable,
    psi: AddChar,
    embedding: &'a Embedding,
) -> Result<ExtendedAddChar<'a>> {
    check_base(base, embedding)?;
    Ok(ExtendedAddChar {
        base,
        psi,
        embedding,
    })
}

/// All Gauss sums `g(chi_c, psi)` for `c = 0..q-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussTable {
    p: u32,
    n: u32,
    scale: u32,
    values: Vec<Complex64>,
}

impl GaussTable {
    pub fn compute(table: &CharTable, psi: AddChar) -> Result<GaussTable> {
        Self::compute_with(table, psi, dft::DEFAULT_DIRECT_THRESHOLD, DEFAULT_TABLE_LIMIT)
    }

    /// `g(chi_c, psi) = sum_m exp(2 pi i c m / (q-1)) psi(g^m)`, a length
    /// `q - 1` transform of `m -> psi(g^m)`.
    pub fn compute_with(
        table: &CharTable,
        psi: AddChar,
        threshold: usize,
        limit: u64,
    ) -> Result<GaussTable> {
        let f = table.field();
        if f.q() as u64 > limit {
            return Err(Error::FieldTooLarge {
                q: f.q() as u64,
                limit,
            });
        }
        let seq: Vec<Complex64> = (0..f.unit_order())
            .map(|m| table.eval_add_exp(psi, m))
            .collect();
        let values = dft::dft(&seq, Sign::Positive, threshold);
        Ok(GaussTable {
            p: f.p(),
            n: f.n(),
            scale: psi.scale_exponent(),
            values,
        })
    }

    /// Direct O(q^2) evaluation through [`CharTable::gauss_sum`].
    pub fn compute_direct(table: &CharTable, psi: AddChar) -> GaussTable {
        let f = table.field();
        GaussTable {
            p: f.p(),
            n: f.n(),
            scale: psi.scale_exponent(),
            values: table.characters().map(|c| table.gauss_sum(c, psi)).collect(),
        }
    }

    pub(crate) fn from_parts(p: u32, n: u32, scale: u32, values: Vec<Complex64>) -> GaussTable {
        GaussTable { p, n, scale, values }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn scale_exponent(&self) -> u32 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `g(chi_c, psi)` for any integer index.
    #[inline]
    pub fn get(&self, c: i64) -> Complex64 {
        self.values[c.rem_euclid(self.values.len() as i64) as usize]
    }

    /// `A_{psi,k} = -g(lambda_2, psi)`.
    pub fn a_norm(&self) -> Complex64 {
        -self.values[self.values.len() / 2]
    }

    /// Whether this table was built for `psi` on `field`.
    pub fn matches(&self, field: &FieldDesc, psi: AddChar) -> bool {
        self.p == field.p() && self.n == field.n() && self.scale == psi.scale_exponent()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,re,im,abs")?;
        for (c, v) in self.values.iter().enumerate() {
            writeln!(w, "{c},{},{},{}", v.re, v.im, v.norm())?;
        }
        Ok(())
    }
}
