//! Normed vector spaces over explicit coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::points::{covered_weight_by, WeightedPointSet};

/// A norm on `R^d`, with the linear operations the normed solvers use.
///
/// Implementations must be an actual norm (homogeneous, triangle
/// inequality); the solvers' guarantees lean on both.
pub trait NormedSpace: Sync {
    fn norm(&self, x: &[f64]) -> f64;

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.norm(&sub(a, b))
    }
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

/// `p`-norm on `R^d`; `p = +inf` is the max norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    p: f64,
}

impl LpNorm {
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return invalid(format!("p must be >= 1, got {p}"));
        }
        Ok(Self { p })
    }

    pub fn euclidean() -> Self {
        Self { p: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn fold(&self, diffs: impl Iterator<Item = f64>) -> f64 {
        if self.p.is_infinite() {
            diffs.map(f64::abs).fold(0.0, f64::max)
        } else if self.p == 2.0 {
            diffs.map(|x| x * x).sum::<f64>().sqrt()
        } else if self.p == 1.0 {
            diffs.map(f64::abs).sum()
        } else {
            diffs.map(|x| x.abs().powf(self.p)).sum::<f64>().powf(1.0 / self.p)
        }
    }
}

impl NormedSpace for LpNorm {
    fn norm(&self, x: &[f64]) -> f64 {
        self.fold(x.iter().copied())
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.fold(a.iter().zip(b).map(|(x, y)| x - y))
    }
}

/// Weight of the closed ball of `radius` around `center`.
pub fn covered_weight<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    center: &[f64],
    radius: f64,
) -> f64 {
    covered_weight_by(ps.weights(), radius, |i| norm.distance(center, ps.point(i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lp_values() {
        let x = [3.0, -4.0];
        assert_eq!(LpNorm::euclidean().norm(&x), 5.0);
        assert_eq!(LpNorm::new(1.0).unwrap().norm(&x), 7.0);
        assert_eq!(LpNorm::new(f64::INFINITY).unwrap().norm(&x), 4.0);
        assert!((LpNorm::new(3.0).unwrap().norm(&x) - 91f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(LpNorm::new(0.5).is_err());
        assert!(LpNorm::new(f64::NAN).is_err());
    }

    #[test]
    fn covered_weight_edges() {
        let ps = WeightedPointSet::new(vec![vec![1.0, 1.0]; 4], vec![1.0, 2.0, 0.5, 0.0]).unwrap();
        let l2 = LpNorm::euclidean();
        assert_eq!(covered_weight(&ps, &l2, &[1.0, 1.0], 0.0), ps.total_weight());
        assert_eq!(covered_weight(&ps, &l2, &[0.0, 0.0], 1.0), 0.0);
    }

    proptest! {
        #[test]
        fn lp_is_a_norm(
            x in prop::collection::vec(-10f64..10.0, 5),
            y in prop::collection::vec(-10f64..10.0, 5),
            c in -5f64..5.0,
            p in prop_oneof![Just(1.0), Just(2.0), Just(3.5), Just(f64::INFINITY)],
        ) {
            let n = LpNorm::new(p).unwrap();
            prop_assert_eq!(n.norm(&[0.0; 5]), 0.0);
            prop_assert!((n.norm(&scale(c, &x)) - c.abs() * n.norm(&x)).abs() <= 1e-9 * (1.0 + n.norm(&x)));
            prop_assert!(n.norm(&add(&x, &y)) <= n.norm(&x) + n.norm(&y) + 1e-9);
            prop_assert!((n.distance(&x, &y) - n.norm(&sub(&x, &y))).abs() <= 1e-9);
        }
    }
}
