//! Limits of moment sequences, distribution comparison and the scan over
//! characteristics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{gcd, Embedding};
use crate::group::{self, classify, Classification, GroupModel, Histogram};
use crate::chars::AddChar;
use crate::moments::{empirical_moment, Fresh, Level, Source};

/// Residuals at or below this count as already converged.
const ZERO_RESIDUAL: f64 = 1e-12;
/// Tolerance for the group verdict of a scan row.
pub const SCAN_TOL: f64 = 0.5;
/// Smallest characteristic whose scan rows are not exploratory.
pub const NON_EXPLORATORY_P: u32 = 17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Converged,
    Trending,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub sequence: Vec<f64>,
    pub estimate: i64,
    pub residuals: Vec<f64>,
    pub verdict: Verdict,
}

pub fn limit_estimate(values: &[f64]) -> Result<LimitEstimate> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            need: 2,
            got: values.len(),
        });
    }
    let last = *values.last().expect("nonempty");
    let estimate = last.round();
    let residuals: Vec<f64> = values.iter().map(|v| (v - estimate).abs()).collect();
    let tail = &residuals[residuals.len() - residuals.len().min(3)..];
    // a tail that sits on the integer is converged even though it cannot decrease
    let settled = tail
        .windows(2)
        .all(|w| w[1] < w[0] || (w[0] <= ZERO_RESIDUAL && w[1] <= ZERO_RESIDUAL));
    let final_res = *tail.last().expect("nonempty");
    let verdict = if settled && final_res < 0.5 {
        Verdict::Converged
    } else if final_res < residuals[0] {
        Verdict::Trending
    } else {
        Verdict::Unstable
    };
    Ok(LimitEstimate {
        sequence: values.to_vec(),
        estimate: estimate as i64,
        residuals,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionComparison {
    pub model: GroupModel,
    pub empirical: Histogram,
    pub theoretical: Histogram,
    /// `sup_x |F_emp(x) - F_model(x)|`, independent of the binning
    pub distance: f64,
    pub sample_size: usize,
}

fn cdf_nodes(model: GroupModel) -> usize {
    match model {
        GroupModel::G2 => 512,
        GroupModel::Sl2Sym6 => 1 << 16,
    }
}

/// Two-sample sup distance between weighted atom lists, each summing to 1.
fn sup_cdf_distance(a: &mut [(f64, f64)], b: &mut [(f64, f64)]) -> f64 {
    a.sort_by(|x, y| x.0.total_cmp(&y.0));
    b.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut sup = 0.0f64;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) => p.0.min(q.0),
            (Some(p), None) => p.0,
            (None, Some(q)) => q.0,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i].0 == x {
            fa += a[i].1;
            i += 1;
        }
        while j < b.len() && b[j].0 == x {
            fb += b[j].1;
            j += 1;
        }
        sup = sup.max((fa - fb).abs());
    }
    sup.clamp(0.0, 1.0)
}

pub fn compare_distributions(
    empirical: &[f64],
    model: GroupModel,
    bins: usize,
) -> Result<DistributionComparison> {
    if empirical.is_empty() {
        return Err(Error::EmptySample);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("at least 1 bin is required".into()));
    }
    let w = 1.0 / empirical.len() as f64;
    let mut emp_atoms: Vec<(f64, f64)> = empirical.iter().map(|&x| (x, w)).collect();
    let mut model_atoms = group::atoms(model, cdf_nodes(model));
    let mut emp_hist = Histogram::new(-7.0, 7.0, bins);
    let mut model_hist = Histogram::new(-7.0, 7.0, bins);
    for &(x, w) in &emp_atoms {
        emp_hist.add(x, w);
    }
    for &(x, w) in &model_atoms {
        model_hist.add(x, w);
    }
    let distance = sup_cdf_distance(&mut emp_atoms, &mut model_atoms);
    Ok(DistributionComparison {
        model,
        empirical: emp_hist,
        theoretical: model_hist,
        distance,
        sample_size: empirical.len(),
    })
}

/// `Re F(a, chi)` for `chi != lambda_2`, with the largest `|Im F|` alongside.
pub fn trace_sample(level: &Level, a_exp: u32) -> (Vec<f64>, f64) {
    let values = crate::moments::normalized_family(level, a_exp);
    let lam = level.field().half_order() as usize;
    let mut max_im = 0.0f64;
    let re = values
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != lam)
        .map(|(_, v)| {
            max_im = max_im.max(v.im.abs());
            v.re
        })
        .collect();
    (re, max_im)
}

/// Exponents `r < gcd(6, q - 1)`; `g^r` represent `k* / (k*)^6`.
pub fn sixth_power_cosets(unit_order: u32) -> Vec<u32> {
    (0..gcd(6, unit_order as u64) as u32).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: u32,
    pub n_max: u32,
    /// exponent of the coset representative in `F_p`
    pub a_exp: u32,
    pub m4: Vec<f64>,
    pub limit: Option<LimitEstimate>,
    pub group: Classification,
    pub exploratory: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub order: u32,
    pub rows: Vec<ScanRow>,
}

/// One row per sixth-power coset of `F_p^*`, with `moment_sequence` over
/// `GF(p^n)`, `n = 1..=n_max`.
pub fn p_scan(p_list: &[u32], n_max: u32, order: u32) -> Result<ScanReport> {
    p_scan_with(p_list, n_max, order, &mut Fresh)
}

pub fn p_scan_with(
    p_list: &[u32],
    n_max: u32,
    order: u32,
    source: &mut impl Source,
) -> Result<ScanReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for &p in p_list {
        let base = source.field(p, 1)?;
        let reps = sixth_power_cosets(base.unit_order());
        let mut m4 = vec![Vec::new(); reps.len()];
        for n in 1..=n_max {
            let big = source.field(p, n)?;
            let emb = Embedding::new(base.clone(), big.clone())?;
            let level = source.level(big, AddChar::BASE)?;
            for (k, &r) in reps.iter().enumerate() {
                let a = emb.embed(base.pow_gen(r as i64));
                let e = a.exponent().expect("unit");
                m4[k].push(empirical_moment(&level, e, order)?.value_excl);
            }
        }
        for (k, &r) in reps.iter().enumerate() {
            let seq = std::mem::take(&mut m4[k]);
            let limit = if seq.len() >= 2 {
                Some(limit_estimate(&seq)?)
            } else {
                None
            };
            let last = *seq.last().expect("n_max >= 1");
            rows.push(ScanRow {
                p,
                n_max,
                a_exp: r,
                m4: seq,
                limit,
                group: classify(last, SCAN_TOL),
                exploratory: p < NON_EXPLORATORY_P,
            });
        }
    }
    Ok(ScanReport { order, rows })
}
