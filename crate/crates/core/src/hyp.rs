//! Hypergeometric sums over finite fields.
//!
//! For upstairs characters `chi_1..chi_u`, downstairs characters
//! `rho_1..rho_w` and `a in k*`,
//!
//! ```text
//! Hyp(a) = sum_{x_1...x_u = a y_1...y_w} psi(sum x_i - sum y_j) prod chi_i(x_i) prod conj(rho_j)(y_j)
//! ```
//!
//! The G2 family uses upstairs `(1, 1, 1, chi, chi, chi-bar, chi-bar)` and
//! downstairs `(lambda_2)`, which is the sum
//! `sum_{x_1...x_7 = x_8 a} psi(x_1 + ... + x_7 - x_8) chi(x_4 x_5 / (x_6 x_7)) lambda_2(x_8)`.
//! Its normalized value is `F(a, chi) = A^{-7} Hyp(a)` with `A = -g(lambda_2, psi)`.
//!
//! Three independent evaluators exist:
//!
//! * [`hyp_naive`]: literal enumeration of all tuples, accumulated as exact
//!   integer counts per (trace, phase) cell. Cost `O(q^7)` for the family.
//! * [`hyp_conv`]: the sum is a multiplicative convolution of the rank-one
//!   functions `t -> psi(t) chi_i(t)` against `t -> psi(-t) conj(rho_j)(t)`;
//!   evaluated by direct cyclic convolutions in the exponent domain, `O(q^2)`.
//! * [`hyp_mellin`]: substituting `a = x_1...x_u / (y_1...y_w)` into
//!   `sum_a Hyp(a) Lambda(a)` frees every variable, giving Mellin coefficients
//!   `M(Lambda) = prod_i g(chi_i Lambda) prod_j (conj(rho_j Lambda))(-1) g(conj(rho_j Lambda))`,
//!   which are read from a [`GaussTable`] and inverted by one DFT, `O(q log q)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chars::{AddChar, CharTable, GaussTable, MulChar};
use crate::dft::{self, Sign};
use crate::error::{Error, Result};
use crate::ff::{FieldDesc, FieldElem};
use crate::sum::ComplexSum;

/// Largest field the naive enumerator accepts.
pub const NAIVE_Q_CAP: u64 = 17;
/// Largest group order `q - 1` accepted by the direct convolution path.
pub const CONV_LEN_CAP: u64 = 1 << 14;
/// Bound on the number of enumerated tuples for general shapes.
const NAIVE_TUPLE_CAP: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Conv,
    Mellin,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "naive" => Ok(Method::Naive),
            "conv" => Ok(Method::Conv),
            "mellin" => Ok(Method::Mellin),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Conv => "conv",
            Method::Mellin => "mellin",
        })
    }
}

/// Character data of a hypergeometric sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypShape {
    upstairs: Vec<MulChar>,
    downstairs: Vec<MulChar>,
}

impl HypShape {
    pub fn new(upstairs: Vec<MulChar>, downstairs: Vec<MulChar>) -> Result<HypShape> {
        if upstairs.is_empty() || downstairs.is_empty() {
            return Err(Error::InvalidArgument(
                "a hypergeometric shape needs at least one upstairs and one downstairs character"
                    .into(),
            ));
        }
        Ok(HypShape {
            upstairs,
            downstairs,
        })
    }

    /// `(1, 1, 1, chi, chi, chi-bar, chi-bar; lambda_2)`
    pub fn g2(table: &CharTable, chi: MulChar) -> HypShape {
        let one = table.trivial();
        HypShape {
            upstairs: vec![one, one, one, chi, chi, chi.conj(), chi.conj()],
            downstairs: vec![table.quadratic()],
        }
    }

    pub fn upstairs(&self) -> &[MulChar] {
        &self.upstairs
    }

    pub fn downstairs(&self) -> &[MulChar] {
        &self.downstairs
    }

    /// Whether some upstairs character also occurs downstairs. The sum is
    /// still evaluated literally; reports flag these shapes.
    pub fn overlaps(&self) -> bool {
        self.upstairs.iter().any(|u| self.downstairs.contains(u))
    }

    /// `M(Lambda_c)` for every `c`, from the Gauss table.
    pub fn mellin_coefficients(&self, gauss: &GaussTable) -> Vec<Complex64> {
        (0..gauss.len() as i64)
            .map(|c| self.mellin_coefficient(gauss, c))
            .collect()
    }

    #[inline]
    pub fn mellin_coefficient(&self, gauss: &GaussTable, c: i64) -> Complex64 {
        let m = gauss.len() as i64;
        let mut acc = Complex64::new(1.0, 0.0);
        for chi in &self.upstairs {
            acc *= gauss.get(chi.index() as i64 + c);
        }
        for rho in &self.downstairs {
            let idx = (-(rho.index() as i64) - c).rem_euclid(m);
            let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
            acc *= gauss.get(idx) * sign;
        }
        acc
    }
}

/// Whether `chi` is one of the finitely many characters for which the G2
/// shape has an upstairs/downstairs collision (only `lambda_2`).
pub fn is_collision_character(table: &CharTable, chi: MulChar) -> bool {
    HypShape::g2(table, chi).overlaps()
}

fn check_naive(field: &FieldDesc, shape: &HypShape) -> Result<()> {
    let q = field.q() as u64;
    if q > NAIVE_Q_CAP {
        return Err(Error::FieldTooLargeForNaive { q, cap: NAIVE_Q_CAP });
    }
    let free = (shape.upstairs.len() + shape.downstairs.len() - 1) as u32;
    let tuples = (q - 1).checked_pow(free).unwrap_or(u64::MAX);
    if tuples > NAIVE_TUPLE_CAP {
        return Err(Error::FieldTooLargeForNaive { q, cap: NAIVE_Q_CAP });
    }
    Ok(())
}

struct Enumerator<'a> {
    field: &'a FieldDesc,
    m: u32,
    half: u32,
    /// (phase increment, upstairs?) per free variable
    vars: Vec<(u32, bool)>,
    a_exp: u32,
    /// `Tr(lambda g^e)` by exponent `e`
    traces: Vec<u32>,
    /// phase of the eliminated variable `y = g^e`, by `e`
    last_phases: Vec<u32>,
}

#[inline(always)]
fn wrap(x: u32, m: u32) -> u32 {
    if x >= m {
        x - m
    } else {
        x
    }
}

impl Enumerator<'_> {
    /// Counts the eliminated variable `y` for the free state `(s, log, phase)`.
    #[inline(always)]
    fn close(&self, a_exp: u32, s: FieldElem, log: u32, phase: u32, counts: &mut [u64], k: u64) {
        let m = self.m;
        let y = wrap(log + m - a_exp, m);
        let s = self.field.add(s, FieldElem::from_exponent(wrap(y + self.half, m)));
        let tr = match s.exponent() {
            None => 0,
            Some(e) => self.traces[e as usize],
        };
        let ph = wrap(phase + self.last_phases[y as usize], m);
        counts[(tr * m + ph) as usize] += k;
    }

    /// Visits every assignment of the free variables as
    /// `(sum with signs, log of the product, phase)`.
    fn walk<F: FnMut(FieldElem, u32, u32)>(&self, depth: usize, s: FieldElem, log: u32, phase: u32, leaf: &mut F) {
        let m = self.m;
        let (step, up) = self.vars[depth];
        let last = depth + 1 == self.vars.len();
        let mut ph = phase;
        for e in 0..m {
            let term = if up { e } else { wrap(e + self.half, m) };
            let s2 = self.field.add(s, FieldElem::from_exponent(term));
            let log2 = if up { wrap(log + e, m) } else { wrap(log + m - e, m) };
            if last {
                leaf(s2, log2, ph);
            } else {
                self.walk(depth + 1, s2, log2, ph, leaf);
            }
            ph = wrap(ph + step, m);
        }
    }

    fn new<'a>(table: &'a CharTable, psi: AddChar, shape: &HypShape, a_exp: u32) -> Enumerator<'a> {
        let field = table.field();
        let m = field.unit_order();
        let (last, free_down) = shape.downstairs.split_last().expect("nonempty");
        let vars: Vec<(u32, bool)> = shape
            .upstairs
            .iter()
            .map(|c| (c.index(), true))
            .chain(free_down.iter().map(|c| (c.conj().index(), false)))
            .collect();
        let scale = psi.scale_exponent();
        let last_phase = last.conj().index() as u64;
        Enumerator {
            field,
            m,
            half: field.half_order(),
            vars,
            a_exp,
            traces: (0..m)
                .map(|e| field.trace_to_prime(FieldElem::from_exponent(wrap(e + scale, m))))
                .collect(),
            last_phases: (0..m as u64).map(|y| (last_phase * y % m as u64) as u32).collect(),
        }
    }
}

fn sum_cells(table: &CharTable, counts: &[u64]) -> Complex64 {
    let m = table.field().unit_order();
    let mut acc = ComplexSum::new();
    for (cell, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let (tr, ph) = (cell as u32 / m, cell as u32 % m);
        acc.add(table.prime_root(tr as u64) * table.unit_root(ph as u64) * count as f64);
    }
    acc.value()
}

/// Literal enumeration of a general hypergeometric sum at one point `a`.
pub fn hyp_naive_shape(
    table: &CharTable,
    psi: AddChar,
    shape: &HypShape,
    a: FieldElem,
) -> Result<Complex64> {
    let field = table.field();
    check_naive(field, shape)?;
    let a_exp = a
        .exponent()
        .ok_or_else(|| Error::InvalidArgument("a must be nonzero".into()))?;
    let en = Enumerator::new(table, psi, shape, a_exp);
    let mut counts = vec![0u64; (field.p() * en.m) as usize];
    en.walk(0, FieldElem::ZERO, 0, 0, &mut |s, log, ph| {
        en.close(en.a_exp, s, log, ph, &mut counts, 1)
    });
    Ok(sum_cells(table, &counts))
}

/// Literal enumeration at every `a` at once: the free variables are
/// enumerated once into exact counts by `(sum, log of product, phase)`, and
/// the eliminated variable is closed for each `a` from those counts.
pub fn hyp_naive_family_shape(
    table: &CharTable,
    psi: AddChar,
    shape: &HypShape,
) -> Result<Vec<Complex64>> {
    let field = table.field();
    check_naive(field, shape)?;
    let en = Enumerator::new(table, psi, shape, 0);
    let m = en.m as usize;
    // s index: exponent, or m for zero
    let mut states = vec![0u64; (m + 1) * m * m];
    en.walk(0, FieldElem::ZERO, 0, 0, &mut |s, log, ph| {
        let si = s.exponent().map_or(m, |e| e as usize);
        states[(si * m + log as usize) * m + ph as usize] += 1;
    });
    let mut out = Vec::with_capacity(m);
    let mut counts = vec![0u64; field.p() as usize * m];
    for a_exp in 0..m as u32 {
        counts.iter_mut().for_each(|c| *c = 0);
        for (idx, &k) in states.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let ph = (idx % m) as u32;
            let log = (idx / m % m) as u32;
            let si = idx / (m * m);
            let s = if si == m { FieldElem::ZERO } else { FieldElem::from_exponent(si as u32) };
            en.close(a_exp, s, log, ph, &mut counts, k);
        }
        out.push(sum_cells(table, &counts));
    }
    Ok(out)
}

pub fn hyp_naive_family(table: &CharTable, psi: AddChar, chi: MulChar) -> Result<Vec<Complex64>> {
    hyp_naive_family_shape(table, psi, &HypShape::g2(table, chi))
}

/// Unnormalized `Hyp(a, chi)` of the G2 family by literal enumeration.
pub fn hyp_naive(table: &CharTable, psi: AddChar, a: FieldElem, chi: MulChar) -> Result<Complex64> {
    hyp_naive_shape(table, psi, &HypShape::g2(table, chi), a)
}

fn cyclic_convolve(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let m = u.len();
    (0..m)
        .map(|e| {
            let mut acc = ComplexSum::new();
            for j in 0..m {
                let k = if e >= j { e - j } else { e + m - j };
                acc.add(u[j] * v[k]);
            }
            acc.value()
        })
        .collect()
}

fn convolve_all(mut factors: Vec<Vec<Complex64>>) -> Vec<Complex64> {
    let mut acc = factors.remove(0);
    for f in factors {
        acc = cyclic_convolve(&acc, &f);
    }
    acc
}

/// `Hyp(a)` for every `a = g^e`, by direct multiplicative convolution.
pub fn hyp_conv_shape(table: &CharTable, psi: AddChar, shape: &HypShape) -> Result<Vec<Complex64>> {
    let field = table.field();
    let m = field.unit_order();
    if m as u64 > CONV_LEN_CAP {
        return Err(Error::FieldTooLargeForConv {
            len: m as u64,
            cap: CONV_LEN_CAP,
        });
    }
    let psi_up: Vec<Complex64> = (0..m).map(|e| table.eval_add_exp(psi, e)).collect();
    let psi_down: Vec<Complex64> = (0..m)
        .map(|e| table.eval_add(psi, field.neg(FieldElem::from_exponent(e))))
        .collect();
    let up = shape
        .upstairs
        .iter()
        .map(|&chi| {
            (0..m)
                .map(|e| psi_up[e as usize] * table.eval_mul_exp(chi, e))
                .collect()
        })
        .collect();
    let down = shape
        .downstairs
        .iter()
        .map(|&rho| {
            (0..m)
                .map(|e| psi_down[e as usize] * table.eval_mul_exp(rho.conj(), e))
                .collect()
        })
        .collect();
    let u = convolve_all(up);
    let d = convolve_all(down);
    let m = m as usize;
    Ok((0..m)
        .map(|ea| {
            let mut acc = ComplexSum::new();
            for (ey, &dv) in d.iter().enumerate() {
                acc.add(u[(ea + ey) % m] * dv);
            }
            acc.value()
        })
        .collect())
}

pub fn hyp_conv(table: &CharTable, psi: AddChar, chi: MulChar) -> Result<Vec<Complex64>> {
    hyp_conv_shape(table, psi, &HypShape::g2(table, chi))
}

/// `Hyp(a)` for every `a = g^e`, from Mellin coefficients and one inverse DFT.
pub fn hyp_mellin_shape(
    table: &CharTable,
    psi: AddChar,
    shape: &HypShape,
    gauss: &GaussTable,
) -> Result<Vec<Complex64>> {
    if !gauss.matches(table.field(), psi) {
        return Err(Error::MissingGaussTable);
    }
    Ok(mellin_inverse(&shape.mellin_coefficients(gauss), dft::DEFAULT_DIRECT_THRESHOLD))
}

pub fn hyp_mellin(
    table: &CharTable,
    psi: AddChar,
    chi: MulChar,
    gauss: &GaussTable,
) -> Result<Vec<Complex64>> {
    hyp_mellin_shape(table, psi, &HypShape::g2(table, chi), gauss)
}

/// `f(g^e) = (q-1)^{-1} sum_c M(c) exp(-2 pi i c e / (q-1))`.
pub fn mellin_inverse(coeffs: &[Complex64], threshold: usize) -> Vec<Complex64> {
    let m = coeffs.len() as f64;
    dft::dft(coeffs, Sign::Negative, threshold)
        .into_iter()
        .map(|v| v / m)
        .collect()
}

/// Single-point inverse Mellin transform of the G2 shape at `a = g^{a_exp}`,
/// `O(q)` per character.
pub fn hyp_mellin_at(table: &CharTable, gauss: &GaussTable, chi: MulChar, a_exp: u32) -> Complex64 {
    let shape = HypShape::g2(table, chi);
    let m = gauss.len() as u64;
    let mut acc = ComplexSum::new();
    for c in 0..m {
        let w = table.unit_root((m - c * a_exp as u64 % m) % m);
        acc.add(shape.mellin_coefficient(gauss, c as i64) * w);
    }
    acc.value() / m as f64
}

/// `A^{-7}`, the normalizing factor of the G2 family.
pub fn normalizer(a_norm: Complex64) -> Complex64 {
    a_norm.powi(-7)
}

/// `Hyp(a, chi)` for every `a` at a fixed `chi`, stored unnormalized.
#[derive(Clone, Debug)]
pub struct HypFamily {
    p: u32,
    n: u32,
    psi_scale: u32,
    chi: u32,
    a_norm: Complex64,
    raw: Vec<Complex64>,
}

impl HypFamily {
    pub fn compute(
        table: &CharTable,
        psi: AddChar,
        chi: MulChar,
        gauss: &GaussTable,
        method: Method,
    ) -> Result<HypFamily> {
        if !gauss.matches(table.field(), psi) {
            return Err(Error::MissingGaussTable);
        }
        let raw = match method {
            Method::Naive => hyp_naive_family(table, psi, chi)?,
            Method::Conv => hyp_conv(table, psi, chi)?,
            Method::Mellin => hyp_mellin(table, psi, chi, gauss)?,
        };
        let f = table.field();
        Ok(HypFamily {
            p: f.p(),
            n: f.n(),
            psi_scale: psi.scale_exponent(),
            chi: chi.index(),
            a_norm: gauss.a_norm(),
            raw,
        })
    }

    /// Every character's family, in ascending character order.
    pub fn compute_all(
        table: &CharTable,
        psi: AddChar,
        gauss: &GaussTable,
        method: Method,
    ) -> Result<Vec<HypFamily>> {
        (0..table.field().unit_order() as i64)
            .into_par_iter()
            .map(|c| HypFamily::compute(table, psi, table.mul_char(c), gauss, method))
            .collect()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn psi_scale(&self) -> u32 {
        self.psi_scale
    }

    pub fn chi_index(&self) -> u32 {
        self.chi
    }

    pub fn a_norm(&self) -> Complex64 {
        self.a_norm
    }

    /// Unnormalized sums indexed by the exponent of `a`.
    pub fn raw(&self) -> &[Complex64] {
        &self.raw
    }

    /// `F(g^e, chi) = A^{-7} Hyp(g^e, chi)`.
    pub fn normalized(&self, a_exp: u32) -> Complex64 {
        self.raw[a_exp as usize] * normalizer(self.a_norm)
    }

    pub fn normalized_values(&self) -> Vec<Complex64> {
        let s = normalizer(self.a_norm);
        self.raw.iter().map(|v| v * s).collect()
    }
}

/// `(F_{psi_lambda}(a, chi), F_psi(lambda^6 a, chi))`, both via `method`.
pub fn psi_scaling_transport(
    table: &CharTable,
    lambda: FieldElem,
    a: FieldElem,
    chi: MulChar,
    method: Method,
) -> Result<(Complex64, Complex64)> {
    let field = table.field();
    let scaled = AddChar::scaled(lambda)?;
    let a_exp = a
        .exponent()
        .ok_or_else(|| Error::InvalidArgument("a must be nonzero".into()))?;
    let moved = field.mul(field.pow(lambda, 6)?, a);
    let moved_exp = moved.exponent().expect("product of units");
    let eval = |psi: AddChar, e: u32| -> Result<Complex64> {
        let gauss = GaussTable::compute(table, psi)?;
        let raw = match method {
            Method::Naive => hyp_naive(table, psi, FieldElem::from_exponent(e), chi)?,
            Method::Conv => hyp_conv(table, psi, chi)?[e as usize],
            Method::Mellin => hyp_mellin_at(table, &gauss, chi, e),
        };
        Ok(raw * normalizer(gauss.a_norm()))
    };
    Ok((eval(scaled, a_exp)?, eval(AddChar::BASE, moved_exp)?))
}
