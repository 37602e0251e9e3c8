//! Coordinate-wise weighted median for `l_p` spaces.
//!
//! For `alpha > 1/2`, if some `l_p` ball of radius `r` around `q` holds
//! `alpha` of the weight, the coordinate-wise weighted median `x` satisfies
//! `|x - q|_p <= (alpha / (alpha - 1/2))^(1/p) * r`. The solver itself never
//! looks at `r`; it is `O(nd)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::points::WeightedPointSet;
use crate::select::weighted_median;
use crate::space::LpNorm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpSpace {
    pub norm: LpNorm,
    pub dim: usize,
}

impl LpSpace {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        Ok(Self { norm: LpNorm::new(p)?, dim })
    }

    pub fn p(&self) -> f64 {
        self.norm.p()
    }
}

/// `(alpha / (alpha - 1/2))^(1/p)`: distance bound from the median to any
/// center of a radius-1 ball holding `alpha` of the weight.
pub fn median_distance_bound(alpha: f64, p: f64) -> f64 {
    (alpha / (alpha - 0.5)).powf(1.0 / p)
}

/// Radius (in units of `r`) of a ball around the median guaranteed to hold
/// `alpha` of the weight.
pub fn coordinate_median_constant(alpha: f64, p: f64) -> f64 {
    median_distance_bound(alpha, p) + 1.0
}

pub fn lp_coordinate_median(ps: &WeightedPointSet<Vec<f64>>, space: &LpSpace, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::UnsupportedFraction { alpha, reason: "coordinate median needs alpha in (1/2, 1]" });
    }
    ps.require_positive_total()?;
    let d = ps.dimension()?;
    if d != space.dim {
        return invalid(format!("points have dimension {d}, space has {}", space.dim));
    }
    let mut column = vec![0.0; ps.len()];
    (0..d)
        .map(|i| {
            for (c, p) in column.iter_mut().zip(ps.points()) {
                *c = p[i];
            }
            weighted_median(&column, ps.weights())
        })
        .collect()
}
