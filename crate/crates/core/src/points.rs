use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Points with nonnegative weights.
///
/// `P` is the point handle: `Vec<f64>` for coordinate-backed sets, `usize`
/// for sets whose geometry lives behind a [`DistanceOracle`](crate::oracle::DistanceOracle).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointSet<P> {
    points: Vec<P>,
    weights: Vec<f64>,
    total: f64,
}

impl<P> WeightedPointSet<P> {
    pub fn new(points: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return invalid(format!("{} points but {} weights", points.len(), weights.len()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return invalid(format!("weights must be finite and nonnegative, got {w}"));
        }
        let total = weights.iter().sum();
        Ok(Self { points, weights, total })
    }

    pub fn uniform(points: Vec<P>) -> Self {
        let weights = vec![1.0; points.len()];
        let total = points.len() as f64;
        Self { points, weights, total }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn point(&self, i: usize) -> &P {
        &self.points[i]
    }

    /// Same points, different weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self>
    where
        P: Clone,
    {
        Self::new(self.points.clone(), weights)
    }

    pub(crate) fn require_positive_total(&self) -> Result<()> {
        if !(self.total > 0.0) {
            return invalid("total weight must be positive");
        }
        Ok(())
    }
}

impl WeightedPointSet<usize> {
    /// Oracle-backed set: point `i` is oracle index `i`.
    pub fn indexed(weights: Vec<f64>) -> Result<Self> {
        let points = (0..weights.len()).collect();
        Self::new(points, weights)
    }
}

impl WeightedPointSet<Vec<f64>> {
    /// Common dimension of all points; errors on ragged input.
    pub fn dimension(&self) -> Result<usize> {
        let d = self.points.first().map_or(0, Vec::len);
        if let Some((i, p)) = self.points.iter().enumerate().find(|(_, p)| p.len() != d) {
            return invalid(format!("point {i} has dimension {} (expected {d})", p.len()));
        }
        Ok(d)
    }
}

/// Ball center: a data point (by index) or an explicit location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    Index(usize),
    Point(Vec<f64>),
}

impl Center {
    pub fn index(&self) -> Option<usize> {
        match self {
            Center::Index(i) => Some(*i),
            Center::Point(_) => None,
        }
    }

    /// Coordinates, resolving an index against `points`.
    pub fn coords<'a>(&'a self, points: &'a [Vec<f64>]) -> &'a [f64] {
        match self {
            Center::Index(i) => &points[*i],
            Center::Point(x) => x,
        }
    }
}

/// A closed ball together with the weight it was measured to hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateBall {
    pub center: Center,
    pub radius: f64,
    pub covered_weight: f64,
}

/// Sum of weights of entries whose distance is `<= radius` (closed ball).
pub fn covered_weight_by<F>(weights: &[f64], radius: f64, mut distance: F) -> f64
where
    F: FnMut(usize) -> f64,
{
    weights.iter().enumerate().filter(|(i, w)| **w > 0.0 && distance(*i) <= radius).map(|(_, w)| *w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_mismatched_weights() {
        assert!(WeightedPointSet::new(vec![0usize, 1], vec![1.0]).is_err());
        assert!(WeightedPointSet::new(vec![0usize], vec![-0.5]).is_err());
        assert!(WeightedPointSet::new(vec![0usize], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn total_matches_recomputation() {
        let w = vec![0.1, 0.2, 0.3, 1e-3, 7.0];
        let ps = WeightedPointSet::indexed(w.clone()).unwrap();
        let recomputed: f64 = w.iter().sum();
        assert!((ps.total_weight() - recomputed).abs() <= 1e-12 * recomputed);
        assert!(WeightedPointSet::indexed(vec![0.0, 0.0]).unwrap().require_positive_total().is_err());
    }

    #[test]
    fn ragged_points_detected() {
        let ps = WeightedPointSet::uniform(vec![vec![0.0, 1.0], vec![2.0]]);
        assert!(ps.dimension().is_err());
    }

    #[test]
    fn closed_ball_membership() {
        let w = [1.0, 2.0, 3.0];
        let d = [0.0, 1.0, 1.0 + 1e-12];
        assert_eq!(covered_weight_by(&w, 1.0, |i| d[i]), 3.0);
        assert_eq!(covered_weight_by(&w, 0.0, |i| d[i]), 1.0);
    }
}
