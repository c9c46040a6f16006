//! Empirical Tannakian moments of the G2 family.
//!
//! For fixed `a`, the empirical `2m`-th moment over the character family is
//! `(q-1)^{-1} sum_chi |F(a, chi)|^{2m}`. The quadratic character is reported
//! separately because its term is bounded by `7^{2m} / (q-1)` and vanishes
//! in the limit.
//!
//! Expanding `|Hyp(a, chi)|^4` into two `x`-copies and two `y`-copies and
//! summing over the full dual group collapses `chi` to the constraint
//! `P(x, y) = 1` on the Laurent monomial
//! `P = prod_j x4j x5j y6j y7j / (y4j y5j x6j x7j)`, which gives the exact identity
//!
//! ```text
//! q^{-15} sum_{P = 1} psi(...) lambda_2(...) = q^{-15} (q-1)^{-1} sum_chi |Hyp(a, chi)|^4.
//! ```
//!
//! Note the left side, with its `q^{-15}` scaling, is `value_all / q`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;
use std::time::Instant;

use crate::analysis::{limit_estimate, LimitEstimate};
use crate::chars::{AddChar, CharTable, GaussTable};
use crate::error::{Error, Result};
use crate::ff::{build_field, Embedding, FieldDesc, FieldElem};
use crate::hyp::{self, hyp_mellin_at, normalizer, HypFamily, Method};
use crate::sum::{CompensatedSum, ComplexSum};

/// Largest supported moment order `2m`.
pub const MAX_ORDER: u32 = 8;
/// Upper bound on tuples visited by [`f_direct`].
const F_DIRECT_TUPLE_CAP: u64 = 1 << 32;

/// The character and Gauss tables of one field with the base character `psi_0`
/// or a scaled one.
#[derive(Clone, Debug)]
pub struct Level {
    pub table: CharTable,
    pub psi: AddChar,
    pub gauss: GaussTable,
}

impl Level {
    pub fn build(p: u32, n: u32) -> Result<Level> {
        Level::from_field(Arc::new(build_field(p, n)?))
    }

    pub fn from_field(field: Arc<FieldDesc>) -> Result<Level> {
        Level::with_psi(field, AddChar::BASE)
    }

    pub fn with_psi(field: Arc<FieldDesc>, psi: AddChar) -> Result<Level> {
        let table = CharTable::new(field);
        let gauss = GaussTable::compute(&table, psi)?;
        Ok(Level { table, psi, gauss })
    }

    pub fn field(&self) -> &FieldDesc {
        self.table.field()
    }

    /// `F(g^{a_exp}, chi_c)` through the single-point inverse Mellin transform.
    pub fn normalized(&self, a_exp: u32, chi: u32) -> Complex64 {
        let chi = self.table.mul_char(chi as i64);
        hyp_mellin_at(&self.table, &self.gauss, chi, a_exp) * normalizer(self.gauss.a_norm())
    }
}

/// Supplies fields and their tables, e.g. from a cache.
pub trait Source {
    fn field(&mut self, p: u32, n: u32) -> Result<Arc<FieldDesc>>;

    fn level(&mut self, field: Arc<FieldDesc>, psi: AddChar) -> Result<Level> {
        Level::with_psi(field, psi)
    }
}

/// Builds every table from scratch.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fresh;

impl Source for Fresh {
    fn field(&mut self, p: u32, n: u32) -> Result<Arc<FieldDesc>> {
        Ok(Arc::new(build_field(p, n)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub p: u32,
    pub n: u32,
    pub a_exp: u32,
    pub order: u32,
    pub value_excl: f64,
    pub value_all: f64,
    pub lambda2_term: f64,
    pub seconds: f64,
    pub path: String,
}

fn check_order(order: u32) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            max: MAX_ORDER,
        });
    }
    if order == 0 || order % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "moment order must be a positive even integer, got {order}"
        )));
    }
    Ok(())
}

/// `F(a, chi)` for every character, ascending index.
pub fn normalized_family(level: &Level, a_exp: u32) -> Vec<Complex64> {
    let m = level.field().unit_order();
    (0..m)
        .into_par_iter()
        .map(|c| level.normalized(a_exp % m, c))
        .collect()
}

pub fn empirical_moment(level: &Level, a_exp: u32, order: u32) -> Result<MomentReport> {
    check_order(order)?;
    let start = Instant::now();
    let f = level.field();
    let m = f.unit_order();
    let a_exp = a_exp % m;
    let values = normalized_family(level, a_exp);
    let lam = f.half_order() as usize;
    let mut excl = CompensatedSum::new();
    for (c, v) in values.iter().enumerate() {
        if c != lam {
            excl.add(v.norm().powi(order as i32));
        }
    }
    let value_excl = excl.value() / m as f64;
    let lambda2_term = values[lam].norm().powi(order as i32) / m as f64;
    Ok(MomentReport {
        p: f.p(),
        n: f.n(),
        a_exp,
        order,
        value_excl,
        value_all: value_excl + lambda2_term,
        lambda2_term,
        seconds: start.elapsed().as_secs_f64(),
        path: "mellin-single-point".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FDirectReport {
    pub p: u32,
    pub n: u32,
    pub a_exp: u32,
    pub f_value: f64,
    pub f_imag: f64,
    pub term_count: u64,
    pub seconds: f64,
}

struct FWalk<'a> {
    field: &'a FieldDesc,
    m: u32,
    a_exp: u32,
    scale_exp: u32,
}

// 4 copies (x_1, x_2, y_1, y_2) of 7 free variables; the copy sign is +1
// for x and -1 for y.
const COPIES: usize = 4;
const FREE: usize = 7;

#[derive(Clone, Copy)]
struct FState {
    sum: FieldElem,
    copy_log: u32,
    p_exp: u32,
    parity: u32,
}

impl FWalk<'_> {
    fn copy_sign(copy: usize) -> bool {
        copy < 2
    }

    fn walk(&self, depth: usize, st: FState, counts: &mut [u64; 2 * 3]) {
        let f = self.field;
        let m = self.m;
        let half = f.half_order();
        let copy = depth / FREE;
        let pos = depth % FREE;
        let plus = Self::copy_sign(copy);
        for e in 0..m {
            // x enters the additive argument with the copy sign
            let term = if plus { e } else { (e + half) % m };
            let mut next = FState {
                sum: f.add(st.sum, FieldElem::from_exponent(term)),
                copy_log: (st.copy_log + e) % m,
                p_exp: st.p_exp,
                parity: st.parity,
            };
            // positions 4,5 enter P with the copy sign, 6,7 with the opposite
            let p_term = match pos {
                3 | 4 => Some(plus),
                5 | 6 => Some(!plus),
                _ => None,
            };
            if let Some(pos_sign) = p_term {
                next.p_exp = if pos_sign {
                    (next.p_exp + e) % m
                } else {
                    (next.p_exp + m - e) % m
                };
            }
            if pos == FREE - 1 {
                // the eighth variable: x_1...x_7 = a x_8
                let e8 = (next.copy_log + m - self.a_exp) % m;
                let minus_x8 = if plus { (e8 + half) % m } else { e8 };
                next.sum = f.add(next.sum, FieldElem::from_exponent(minus_x8));
                next.parity ^= e8 & 1;
                next.copy_log = 0;
                if copy == COPIES - 1 {
                    if next.p_exp == 0 {
                        let tr = match next.sum.exponent() {
                            None => 0,
                            Some(s) => f.trace_to_prime(FieldElem::from_exponent(
                                (s + self.scale_exp) % m,
                            )),
                        };
                        counts[(tr * 2 + next.parity) as usize] += 1;
                    }
                    continue;
                }
            }
            self.walk(depth + 1, next, counts);
        }
    }
}

/// `f(psi, k, a) = |k|^{-15} sum_{P = 1} psi(...) lambda_2(...)` by literal
/// enumeration of the 28 free variables; `p = 3` only.
pub fn f_direct(table: &CharTable, psi: AddChar, a: FieldElem) -> Result<FDirectReport> {
    let start = Instant::now();
    let field = table.field();
    if field.p() != 3 {
        return Err(Error::UnsupportedCharacteristic {
            expected: 3,
            got: field.p(),
        });
    }
    let m = field.unit_order();
    let tuples = (m as u64).checked_pow((COPIES * FREE) as u32).unwrap_or(u64::MAX);
    if tuples > F_DIRECT_TUPLE_CAP {
        return Err(Error::FieldTooLarge {
            q: field.q() as u64,
            limit: 3,
        });
    }
    let a_exp = a
        .exponent()
        .ok_or_else(|| Error::InvalidArgument("a must be nonzero".into()))?;
    let walker = FWalk {
        field,
        m,
        a_exp,
        scale_exp: psi.scale_exponent(),
    };
    let init = FState {
        sum: FieldElem::ZERO,
        copy_log: 0,
        p_exp: 0,
        parity: 0,
    };
    // outermost variable split across workers, partial counts merged in order
    let partials: Vec<[u64; 6]> = (0..m)
        .into_par_iter()
        .map(|e| {
            let mut counts = [0u64; 6];
            let first = FState {
                sum: FieldElem::from_exponent(e),
                copy_log: e,
                ..init
            };
            walker.walk(1, first, &mut counts);
            counts
        })
        .collect();
    let mut counts = [0u64; 6];
    for part in &partials {
        for (c, v) in counts.iter_mut().zip(part) {
            *c += v;
        }
    }
    let mut acc = ComplexSum::new();
    for (cell, &count) in counts.iter().enumerate() {
        let (tr, parity) = (cell / 2, cell % 2);
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        acc.add(table.prime_root(tr as u64) * sign * count as f64);
    }
    let scale = (field.q() as f64).powi(-15);
    let total = acc.value() * scale;
    Ok(FDirectReport {
        p: field.p(),
        n: field.n(),
        a_exp,
        f_value: total.re,
        f_imag: total.im,
        term_count: counts.iter().sum(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// `q^{-15} (q-1)^{-1} sum_chi |Hyp(a, chi)|^4` from raw families.
pub fn character_side(families: &[HypFamily], a_exp: u32, q: u32) -> f64 {
    let m = families.len() as f64;
    let total: f64 = families
        .iter()
        .map(|fam| fam.raw()[a_exp as usize].norm_sqr().powi(2))
        .collect::<CompensatedSum>()
        .value();
    total / m * (q as f64).powi(-15)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub p: u32,
    pub n: u32,
    pub a_exp: u32,
    /// `f_direct`, or the character side from an independent evaluator
    pub lhs: f64,
    pub lhs_path: String,
    /// character side from the Mellin path
    pub rhs: f64,
    pub residual: f64,
    pub relative_residual: f64,
}

pub fn orthogonality_identity_check(level: &Level, a_exp: u32) -> Result<IdentityReport> {
    let table = &level.table;
    let f = table.field();
    let a_exp = a_exp % f.unit_order();
    let a = FieldElem::from_exponent(a_exp);
    let families = |method| HypFamily::compute_all(table, level.psi, &level.gauss, method);
    let rhs = character_side(&families(Method::Mellin)?, a_exp, f.q());
    let (lhs, lhs_path) = if f.p() == 3 && f.n() == 1 {
        (f_direct(table, level.psi, a)?.f_value, "f_direct")
    } else if f.q() as u64 <= 13 {
        (character_side(&families(Method::Naive)?, a_exp, f.q()), "naive")
    } else if f.unit_order() as u64 <= hyp::CONV_LEN_CAP {
        (character_side(&families(Method::Conv)?, a_exp, f.q()), "conv")
    } else {
        return Err(Error::FieldTooLarge {
            q: f.q() as u64,
            limit: hyp::CONV_LEN_CAP + 1,
        });
    };
    let residual = (lhs - rhs).abs();
    Ok(IdentityReport {
        p: f.p(),
        n: f.n(),
        a_exp,
        lhs,
        lhs_path: lhs_path.into(),
        rhs,
        residual,
        relative_residual: residual / rhs.abs().max(f64::MIN_POSITIVE),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    pub p: u32,
    pub base_degree: u32,
    /// exponent of `a` in the base field
    pub a_exp: u32,
    pub order: u32,
    pub reports: Vec<MomentReport>,
    pub limit: LimitEstimate,
}

/// Moments along the tower `GF(p^{d n})`, `n` in `degrees`, of
/// `a = g_base^{a_exp}` embedded from the base field `GF(p^d)`.
pub fn moment_sequence(
    p: u32,
    base_degree: u32,
    a_exp: u32,
    order: u32,
    degrees: impl IntoIterator<Item = u32>,
) -> Result<MomentSequence> {
    moment_sequence_with(p, base_degree, a_exp, order, degrees, &mut Fresh)
}

pub fn moment_sequence_with(
    p: u32,
    base_degree: u32,
    a_exp: u32,
    order: u32,
    degrees: impl IntoIterator<Item = u32>,
    source: &mut impl Source,
) -> Result<MomentSequence> {
    check_order(order)?;
    let base = source.field(p, base_degree)?;
    let a = base.pow_gen(a_exp as i64);
    let mut reports = Vec::new();
    for n in degrees {
        let big = source.field(p, base_degree * n)?;
        let a_big = Embedding::new(base.clone(), big.clone())?.embed(a);
        let level = source.level(big, AddChar::BASE)?;
        let e = a_big.exponent().expect("embedding preserves units");
        reports.push(empirical_moment(&level, e, order)?);
    }
    let values: Vec<f64> = reports.iter().map(|r| r.value_excl).collect();
    let limit = limit_estimate(&values)?;
    Ok(MomentSequence {
        p,
        base_degree,
        a_exp: a.exponent().expect("unit"),
        order,
        reports,
        limit,
    })
}
