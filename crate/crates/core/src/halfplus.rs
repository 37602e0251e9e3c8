//! `O(nd)` solver for `alpha > 1/2` in an arbitrary normed space.
//!
//! One level of the recursion pairs consecutive points, keeps the heavier
//! point of each pair with weight `w1 + w2` (pair within `2r`) or
//! `|w1 - w2|` (pair farther apart), and solves the half-size instance at
//! radius `3r`. The returned center is then pulled back toward the dense
//! ball by repeated weighted centroids of the original points, shrinking the
//! containing radius from `(3C + 4) r` to at most `C r`, where
//! `C = 4 alpha / (2 alpha - 1)`.

use crate::error::{check_radius, Error, Result};
use crate::points::{CandidateBall, Center, WeightedPointSet};
use crate::space::{covered_weight, NormedSpace};

/// Points and norm shared by the normed solvers; subsets are index lists.
pub(crate) struct Normed<'a, N: ?Sized> {
    pub points: &'a [Vec<f64>],
    pub norm: &'a N,
}

impl<N: NormedSpace + ?Sized> Normed<'_, N> {
    pub fn dist_to(&self, x: &[f64], i: usize) -> f64 {
        self.norm.distance(x, &self.points[i])
    }

    /// Weighted centroid of the subset members within `radius` of `a`.
    pub fn centroid_within(&self, idx: &[usize], w: &[f64], a: &[f64], radius: f64) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; a.len()];
        let mut mass = 0.0;
        for (&i, &wi) in idx.iter().zip(w) {
            if wi > 0.0 && self.dist_to(a, i) <= radius {
                for (s, x) in sum.iter_mut().zip(&self.points[i]) {
                    *s += wi * x;
                }
                mass += wi;
            }
        }
        (mass > 0.0).then(|| sum.into_iter().map(|s| s / mass).collect())
    }

    pub fn subset_weight_within(&self, idx: &[usize], w: &[f64], a: &[f64], radius: f64) -> f64 {
        idx.iter().zip(w).filter(|(&i, &wi)| wi > 0.0 && self.dist_to(a, i) <= radius).map(|(_, wi)| wi).sum()
    }
}

/// Approximation constant `4 alpha / (2 alpha - 1)`, equal to `2 + 1/(alpha - 1/2)`.
pub fn halfplus_constant(alpha: f64) -> f64 {
    4.0 * alpha / (2.0 * alpha - 1.0)
}

/// Upper bound on centroid iterations: `ceil(ln 5 / ln(1 / (1 - eps)))`.
pub fn refine_iteration_bound(alpha: f64) -> usize {
    let eps = alpha - 0.5;
    (5f64.ln() / (1.0 / (1.0 - eps)).ln()).ceil() as usize
}

/// Result of one pairing pass. `centers` index the input set.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReduction {
    pub centers: Vec<usize>,
    pub weights: Vec<f64>,
}

impl PairReduction {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn pair_reduce<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    r: f64,
) -> Result<PairReduction> {
    check_radius(r)?;
    if ps.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let ctx = Normed { points: ps.points(), norm };
    let idx: Vec<usize> = (0..ps.len()).collect();
    let (centers, weights) = pair_indices(&ctx, &idx, ps.weights(), r);
    Ok(PairReduction { centers, weights })
}

fn pair_indices<N: NormedSpace + ?Sized>(
    ctx: &Normed<'_, N>,
    idx: &[usize],
    w: &[f64],
    r: f64,
) -> (Vec<usize>, Vec<f64>) {
    let m = idx.len().div_ceil(2);
    let mut centers = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for k in 0..m {
        let (i, wi) = (idx[2 * k], w[2 * k]);
        // odd tail: pair with a zero-weight copy of the first point
        let (j, wj) = if 2 * k + 1 < idx.len() { (idx[2 * k + 1], w[2 * k + 1]) } else { (idx[0], 0.0) };
        let close = ctx.norm.distance(&ctx.points[i], &ctx.points[j]) <= 2.0 * r;
        centers.push(if wi >= wj { i } else { j });
        weights.push(if close { wi + wj } else { wi.max(wj) - wi.min(wj) });
    }
    (centers, weights)
}

fn check_halfplus_fraction(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::UnsupportedFraction { alpha, reason: "this solver needs alpha in (1/2, 1]" });
    }
    Ok(())
}

/// One centroid step: the weighted centroid of the points within `k * r` of `a`.
///
/// Requires `k >= 2 + 1/eps` with `eps = alpha - 1/2`. When the radius-`k r`
/// ball around `a` contains a radius-`r` ball holding `alpha` of the weight,
/// the result lies within `(k - k eps - 1) r` of that ball's center.
pub fn centroid_refine<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    a: &[f64],
    k: f64,
    r: f64,
    alpha: f64,
) -> Result<Vec<f64>> {
    check_halfplus_fraction(alpha)?;
    check_radius(r)?;
    let min_k = 2.0 + 1.0 / (alpha - 0.5);
    if k < min_k * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!("K = {k} is below 2 + 1/eps = {min_k}")));
    }
    let ctx = Normed { points: ps.points(), norm };
    let idx: Vec<usize> = (0..ps.len()).collect();
    ctx.centroid_within(&idx, ps.weights(), a, k * r)
        .ok_or_else(|| Error::Degenerate(format!("no weighted point within {} of the start", k * r)))
}

/// One recorded centroid step: the multiplier before the step and the new center.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineStep {
    pub k: f64,
    pub center: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineTrace {
    pub start: Vec<f64>,
    pub steps: Vec<RefineStep>,
    /// Multiplier after the last step; `<= C` unless the loop stopped early.
    pub final_k: f64,
    /// Set when some step found no weighted point to average.
    pub degenerate: bool,
}

impl RefineTrace {
    pub fn center(&self) -> &[f64] {
        self.steps.last().map_or(&self.start, |s| &s.center)
    }
}

/// Centroid loop from `K = 3C + 4` down to `K <= C` against the full set.
pub fn refine_from<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    start: &[f64],
    alpha: f64,
    r: f64,
) -> Result<RefineTrace> {
    check_halfplus_fraction(alpha)?;
    check_radius(r)?;
    let ctx = Normed { points: ps.points(), norm };
    let idx: Vec<usize> = (0..ps.len()).collect();
    Ok(refine_loop(&ctx, &idx, ps.weights(), start.to_vec(), alpha, r))
}

fn refine_loop<N: NormedSpace + ?Sized>(
    ctx: &Normed<'_, N>,
    idx: &[usize],
    w: &[f64],
    start: Vec<f64>,
    alpha: f64,
    r: f64,
) -> RefineTrace {
    let eps = alpha - 0.5;
    let c = halfplus_constant(alpha);
    let mut k = 3.0 * c + 4.0;
    let mut trace = RefineTrace { start, steps: Vec::new(), final_k: k, degenerate: false };
    while k > c {
        match ctx.centroid_within(idx, w, trace.center(), k * r) {
            Some(center) => trace.steps.push(RefineStep { k, center }),
            None => {
                trace.degenerate = true;
                break;
            }
        }
        k *= 1.0 - eps;
    }
    trace.final_k = k;
    trace
}

/// Solver for `alpha > 1/2` given the radius `r` of the dense ball.
///
/// Always returns a ball of radius exactly `C r`. It is guaranteed to hold
/// `alpha` of the weight only if some radius-`r` ball does; callers that
/// cannot vouch for that should check `covered_weight`.
pub fn cluster_halfplus<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    alpha: f64,
    r: f64,
) -> Result<CandidateBall> {
    check_halfplus_fraction(alpha)?;
    check_radius(r)?;
    ps.require_positive_total()?;
    ps.dimension()?;
    let ctx = Normed { points: ps.points(), norm };
    let idx: Vec<usize> = (0..ps.len()).collect();
    let center = solve(&ctx, &idx, ps.weights(), alpha, r);
    let radius = halfplus_constant(alpha) * r;
    let covered_weight = covered_weight(ps, norm, &center, radius);
    Ok(CandidateBall { center: Center::Point(center), radius, covered_weight })
}

/// Center of the recursion on an index subset. Infallible: degenerate
/// levels fall back to an unrefined center.
pub(crate) fn solve<N: NormedSpace + ?Sized>(
    ctx: &Normed<'_, N>,
    idx: &[usize],
    w: &[f64],
    alpha: f64,
    r: f64,
) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    if idx.len() == 1 || !(total > 0.0) {
        return ctx.points[idx[0]].clone();
    }
    let (reduced, v) = pair_indices(ctx, idx, w, r);
    let p = solve(ctx, &reduced, &v, alpha, 3.0 * r);
    let trace = refine_loop(ctx, idx, w, p, alpha, r);
    trace.center().to_vec()
}
