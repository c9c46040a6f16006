//! Haar statistics of the seven-dimensional candidates `G2` and `SL2` acting
//! through `Sym^6`, by Weyl integration over a maximal torus.
//!
//! The integrands are trigonometric polynomials of low degree, so the
//! equispaced trapezoid rule is exact once the node count exceeds the degree.
//!
//! G2 torus coordinates: the seven weights are `0`, `±t1`, `±t2`, `±(t1 + t2)`
//! (the short roots). The long roots are `t1 - t2`, `2 t1 + t2`, `t1 + 2 t2`.

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

pub const DEFAULT_NODES: usize = 256;
pub const MAX_ORDER: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GroupModel {
    #[serde(rename = "G2")]
    G2,
    #[serde(rename = "SL2")]
    Sl2Sym6,
}

impl GroupModel {
    pub fn torus_dim(self) -> usize {
        match self {
            GroupModel::G2 => 2,
            GroupModel::Sl2Sym6 => 1,
        }
    }

    /// Trace of the seven-dimensional representation at the torus point `t`.
    pub fn trace(self, t: &[f64]) -> f64 {
        match self {
            GroupModel::G2 => {
                let (a, b) = (t[0], t[1]);
                1.0 + 2.0 * (a.cos() + b.cos() + (a + b).cos())
            }
            GroupModel::Sl2Sym6 => 1.0 + (1..=3).map(|j| 2.0 * (2.0 * j as f64 * t[0]).cos()).sum::<f64>(),
        }
    }

    /// Weyl integration density against normalized Lebesgue measure on the torus.
    pub fn weyl_density(self, t: &[f64]) -> f64 {
        let factor = |x: f64| 2.0 - 2.0 * x.cos();
        match self {
            GroupModel::G2 => {
                let (a, b) = (t[0], t[1]);
                let roots = [a, b, a + b, a - b, 2.0 * a + b, a + 2.0 * b];
                roots.iter().map(|&r| factor(r)).product::<f64>() / 12.0
            }
            GroupModel::Sl2Sym6 => factor(2.0 * t[0]) / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupModel::G2 => "G2",
            GroupModel::Sl2Sym6 => "SL2",
        }
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g2" => Ok(GroupModel::G2),
            "sl2" | "sl2_sym6" | "sym6" => Ok(GroupModel::Sl2Sym6),
            other => Err(Error::InvalidArgument(format!("unknown group '{other}'"))),
        }
    }
}

/// Quadrature atoms `(trace, weight)` on the equispaced torus grid; the
/// weights are density times cell volume and sum to 1.
pub fn atoms(model: GroupModel, nodes: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * PI / nodes as f64;
    match model.torus_dim() {
        1 => (0..nodes)
            .map(|i| {
                let t = [i as f64 * h];
                (model.trace(&t), model.weyl_density(&t) / nodes as f64)
            })
            .collect(),
        _ => {
            let w = 1.0 / (nodes * nodes) as f64;
            let mut out = Vec::with_capacity(nodes * nodes);
            for i in 0..nodes {
                for j in 0..nodes {
                    let t = [i as f64 * h, j as f64 * h];
                    out.push((model.trace(&t), model.weyl_density(&t) * w));
                }
            }
            out
        }
    }
}

/// `E[tr^k]` under Haar measure, `k <= 12`.
pub fn theoretical_moment_with(model: GroupModel, order: u32, nodes: usize) -> Result<f64> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(atoms(model, nodes)
        .into_iter()
        .map(|(t, w)| t.powi(order as i32) * w)
        .collect::<CompensatedSum>()
        .value())
}

pub fn theoretical_moment(model: GroupModel, order: u32) -> Result<f64> {
    theoretical_moment_with(model, order, DEFAULT_NODES)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub mass: Vec<f64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Histogram {
        Histogram {
            lo,
            hi,
            mass: vec![0.0; bins],
        }
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|i| self.center(i)).collect()
    }

    /// Values outside `[lo, hi]` land in the end bins.
    pub fn add(&mut self, x: f64, w: f64) {
        let b = self.bins();
        let i = ((x - self.lo) / self.width()).floor();
        let i = if i.is_nan() || i < 0.0 {
            0
        } else {
            (i as usize).min(b - 1)
        };
        self.mass[i] += w;
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().copied().collect::<CompensatedSum>().value()
    }
}

/// Haar distribution of the trace on `[-7, 7]`.
pub fn trace_density(model: GroupModel, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::InvalidArgument("at least 2 bins are required".into()));
    }
    let nodes = match model {
        GroupModel::G2 => 512,
        GroupModel::Sl2Sym6 => 1 << 16,
    };
    let mut h = Histogram::new(-7.0, 7.0, bins);
    for (t, w) in atoms(model, nodes) {
        h.add(t, w);
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    G2,
    SL2,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::G2 => "G2",
            Classification::SL2 => "SL2",
            Classification::Inconclusive => "Inconclusive",
        })
    }
}

/// Compares a fourth moment with the G2 value 4 and the SL2 value 7.
pub fn classify(m4: f64, tol: f64) -> Classification {
    let g2 = (m4 - 4.0).abs() <= tol;
    let sl2 = (m4 - 7.0).abs() <= tol;
    match (g2, sl2) {
        (true, false) => Classification::G2,
        (false, true) => Classification::SL2,
        _ => Classification::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MODELS: [GroupModel; 2] = [GroupModel::G2, GroupModel::Sl2Sym6];

    #[test]
    fn identity_has_trace_seven() {
        assert_eq!(GroupModel::G2.trace(&[0.0, 0.0]), 7.0);
        assert_eq!(GroupModel::Sl2Sym6.trace(&[0.0]), 7.0);
    }

    #[test]
    fn density_integrates_to_one() {
        for m in MODELS {
            assert!((theoretical_moment(m, 0).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn low_moments() {
        let cases = [
            (GroupModel::G2, 1, 0.0),
            (GroupModel::G2, 2, 1.0),
            (GroupModel::G2, 3, 1.0),
            (GroupModel::G2, 4, 4.0),
            (GroupModel::G2, 6, 35.0),
            (GroupModel::Sl2Sym6, 1, 0.0),
            (GroupModel::Sl2Sym6, 2, 1.0),
            (GroupModel::Sl2Sym6, 4, 7.0),
        ];
        for (m, k, want) in cases {
            let got = theoretical_moment(m, k).unwrap();
            assert!((got - want).abs() < 1e-8, "{m} {k}: {got}");
        }
    }

    #[test]
    fn plateau_under_refinement() {
        for m in MODELS {
            for k in [2, 4, 8, 12] {
                let a = theoretical_moment_with(m, k, 256).unwrap();
                let b = theoretical_moment_with(m, k, 512).unwrap();
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{m} {k}");
                assert!((a - a.round()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn order_cap() {
        assert!(matches!(
            theoretical_moment(GroupModel::G2, 14),
            Err(Error::OrderTooLarge { order: 14, max: 12 })
        ));
    }

    #[test]
    fn density_nonnegative_on_grid() {
        for m in MODELS {
            assert!(atoms(m, 300).iter().all(|&(_, w)| w >= 0.0));
        }
    }

    #[test]
    fn histogram_mass_and_fourth_moment() {
        for m in MODELS {
            let h = trace_density(m, 140).unwrap();
            assert!((h.total() - 1.0).abs() < 1e-8);
        }
        let h = trace_density(GroupModel::G2, 280).unwrap();
        let m4: f64 = h
            .centers()
            .iter()
            .zip(&h.mass)
            .map(|(c, w)| c.powi(4) * w)
            .sum();
        assert!((m4 - 4.0).abs() < 0.05, "{m4}");
        assert!(trace_density(GroupModel::G2, 1).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(4.03, 0.5), Classification::G2);
        assert_eq!(classify(6.9, 0.5), Classification::SL2);
        assert_eq!(classify(5.5, 0.5), Classification::Inconclusive);
        assert_eq!(classify(5.5, 2.0), Classification::Inconclusive);
        for (m, want) in [(GroupModel::G2, Classification::G2), (GroupModel::Sl2Sym6, Classification::SL2)] {
            assert_eq!(classify(theoretical_moment(m, 4).unwrap(), 0.5), want);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("g2".parse::<GroupModel>().unwrap(), GroupModel::G2);
        assert_eq!("SL2".parse::<GroupModel>().unwrap(), GroupModel::Sl2Sym6);
        assert!("e8".parse::<GroupModel>().is_err());
    }

    proptest! {
        #[test]
        fn trace_bounded(a in 0.0..2.0 * PI, b in 0.0..2.0 * PI) {
            prop_assert!(GroupModel::G2.trace(&[a, b]).abs() <= 7.0 + 1e-12);
            prop_assert!(GroupModel::Sl2Sym6.trace(&[a]).abs() <= 7.0 + 1e-12);
            prop_assert!(GroupModel::G2.weyl_density(&[a, b]) >= 0.0);
        }
    }
}
