//! Ground truth: quadratic brute force, linear-time ball verification and
//! the randomized pick-and-verify baseline.
//!
//! Everything here works over a [`Geometry`], either explicit points with a
//! norm or an index set behind a distance oracle.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::oracle::DistanceOracle;
use crate::points::{CandidateBall, Center, WeightedPointSet};
use crate::select::WEIGHT_SLACK;
use crate::space::NormedSpace;

/// Attempt cap used by [`las_vegas_baseline`] callers that have no opinion.
pub const DEFAULT_ATTEMPT_CAP: usize = 100_000;

pub trait Geometry {
    fn weights(&self) -> &[f64];

    /// Distance between input points `i` and `j`.
    fn between(&self, i: usize, j: usize) -> f64;

    /// Distance from `center` to input point `j`.
    fn center_distance(&self, center: &Center, j: usize) -> Result<f64>;

    fn total_weight(&self) -> f64 {
        self.weights().iter().sum()
    }
}

pub struct NormedGeometry<'a, N: ?Sized> {
    pub ps: &'a WeightedPointSet<Vec<f64>>,
    pub norm: &'a N,
}

impl<'a, N: NormedSpace + ?Sized> NormedGeometry<'a, N> {
    pub fn new(ps: &'a WeightedPointSet<Vec<f64>>, norm: &'a N) -> Self {
        Self { ps, norm }
    }
}

impl<N: NormedSpace + ?Sized> Geometry for NormedGeometry<'_, N> {
    fn weights(&self) -> &[f64] {
        self.ps.weights()
    }
    fn between(&self, i: usize, j: usize) -> f64 {
        self.norm.distance(self.ps.point(i), self.ps.point(j))
    }
    fn center_distance(&self, center: &Center, j: usize) -> Result<f64> {
        match center {
            Center::Index(i) if *i < self.ps.len() => Ok(self.between(*i, j)),
            Center::Index(i) => invalid(format!("center index {i} out of range")),
            Center::Point(x) => Ok(self.norm.distance(x, self.ps.point(j))),
        }
    }
}

pub struct MetricGeometry<'a, O: ?Sized> {
    pub ps: &'a WeightedPointSet<usize>,
    pub oracle: &'a O,
}

impl<'a, O: DistanceOracle + ?Sized> MetricGeometry<'a, O> {
    pub fn new(ps: &'a WeightedPointSet<usize>, oracle: &'a O) -> Self {
        Self { ps, oracle }
    }
}

impl<O: DistanceOracle + ?Sized> Geometry for MetricGeometry<'_, O> {
    fn weights(&self) -> &[f64] {
        self.ps.weights()
    }
    fn between(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.oracle.dist(*self.ps.point(i), *self.ps.point(j))
        }
    }
    fn center_distance(&self, center: &Center, j: usize) -> Result<f64> {
        match center {
            Center::Index(i) if *i < self.ps.len() => Ok(self.between(*i, j)),
            Center::Index(i) => invalid(format!("center index {i} out of range")),
            Center::Point(_) => invalid("a metric space has no coordinates; centers must be indices"),
        }
    }
}

fn require_positive<G: Geometry + ?Sized>(g: &G) -> Result<f64> {
    let w = g.total_weight();
    if !(w > 0.0) {
        return invalid("total weight must be positive");
    }
    Ok(w)
}

/// Every input point tried as a center; the one with the smallest radius
/// reaching `alpha w` wins, ties to the lowest index. Radii come from a
/// plain sort-and-scan, independent of the selection code the solvers use.
pub fn brute_force_best<G: Geometry + ?Sized>(g: &G, alpha: f64) -> Result<CandidateBall> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    let total = require_positive(g)?;
    let target = alpha * total - WEIGHT_SLACK * total;
    let w = g.weights();
    let n = w.len();
    let mut best: Option<(usize, f64)> = None;
    let mut row = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for (j, d) in row.iter_mut().enumerate() {
            *d = g.between(i, j);
        }
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
        let mut cum = 0.0;
        let mut radius = f64::INFINITY;
        for &j in &order {
            cum += w[j];
            if cum >= target {
                radius = row[j];
                break;
            }
        }
        if best.is_none_or(|(_, b)| radius < b) {
            best = Some((i, radius));
        }
    }
    let (i, radius) = best.expect("nonempty input");
    let center = Center::Index(i);
    let covered_weight = covered(g, &center, radius)?;
    Ok(CandidateBall { center, radius, covered_weight })
}

fn covered<G: Geometry + ?Sized>(g: &G, center: &Center, radius: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (j, &wj) in g.weights().iter().enumerate() {
        if wj > 0.0 && g.center_distance(center, j)? <= radius {
            sum += wj;
        }
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub ok: bool,
    pub covered_weight: f64,
}

/// Recomputes the covered weight of `ball`; passes iff it is at least
/// `alpha w - 1e-12 w`.
pub fn verify_ball<G: Geometry + ?Sized>(g: &G, ball: &CandidateBall, alpha: f64) -> Result<Verification> {
    if !(ball.radius >= 0.0) {
        return invalid(format!("radius must be nonnegative, got {}", ball.radius));
    }
    let total = g.total_weight();
    let covered_weight = covered(g, &ball.center, ball.radius)?;
    Ok(Verification { ok: covered_weight >= alpha * total - WEIGHT_SLACK * total, covered_weight })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LasVegasOutcome {
    /// `None` when the attempt cap ran out.
    pub ball: Option<CandidateBall>,
    pub attempts: usize,
}

/// Weight-proportional index stream used by the baseline.
pub struct WeightedDraws {
    rng: ChaCha8Rng,
    dist: WeightedIndex<f64>,
}

impl WeightedDraws {
    pub fn new(weights: &[f64], seed: u64) -> Result<Self> {
        let dist = WeightedIndex::new(weights).map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
        Ok(Self { rng: ChaCha8Rng::seed_from_u64(seed), dist })
    }
}

impl Iterator for WeightedDraws {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        Some(self.dist.sample(&mut self.rng))
    }
}

/// Draws points with probability proportional to weight until the radius
/// `2r` ball around one covers `alpha w`. When some radius-`r` ball holds
/// `alpha w`, each draw lands inside it with probability `>= alpha`, so the
/// expected number of attempts is at most `1/alpha`.
pub fn las_vegas_baseline<G: Geometry + ?Sized>(
    g: &G,
    alpha: f64,
    r: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<LasVegasOutcome> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return invalid(format!("radius must be finite and nonnegative, got {r}"));
    }
    require_positive(g)?;
    let draws = WeightedDraws::new(g.weights(), seed)?;
    for (attempt, i) in draws.take(max_attempts).enumerate() {
        let ball = CandidateBall { center: Center::Index(i), radius: 2.0 * r, covered_weight: 0.0 };
        let v = verify_ball(g, &ball, alpha)?;
        if v.ok {
            return Ok(LasVegasOutcome {
                ball: Some(CandidateBall { covered_weight: v.covered_weight, ..ball }),
                attempts: attempt + 1,
            });
        }
    }
    Ok(LasVegasOutcome { ball: None, attempts: max_attempts })
}
