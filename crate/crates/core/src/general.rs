//! Normed-space solvers for every `alpha in (0, 1)`.
//!
//! Building blocks, bottom up:
//!
//! - [`ball_cover`]: turns any single-ball solver into a short list of balls
//!   that every dense radius-`r` ball must touch, by peeling.
//! - [`below_half_cover`]: divide-and-conquer cover under a gap hypothesis
//!   (the dense ball outweighs its `(2C+3)`-shell by `alpha w`).
//! - [`cluster_any_alpha`]: removes the gap hypothesis by trying
//!   geometrically growing radii.
//! - [`bucket_reduce`] / [`cluster_logtower`]: bucket the input, cover each
//!   bucket, and solve again on the bucket representatives; stacking this
//!   `k` times trades a larger constant for a faster-growing bucket size.
//!
//! Point removal is always done by zeroing weights so indices stay stable.

use serde::{Deserialize, Serialize};

use crate::error::{check_radius, invalid, Error, Result};
use crate::halfplus::{self, halfplus_constant, Normed};
use crate::points::{covered_weight_by, CandidateBall, Center, WeightedPointSet};
use crate::select::WEIGHT_SLACK;
use crate::space::NormedSpace;

/// A single-ball solver usable for every fraction it [`accepts`](Self::accepts).
///
/// `solve` returns a ball of radius at most `constant(fraction) * r` that
/// holds `fraction` of the weight whenever some radius-`r` ball does. It may
/// return `None` or an unverified ball otherwise.
pub trait FractionSolver<N: NormedSpace + ?Sized> {
    fn name(&self) -> &'static str;

    fn accepts(&self, fraction: f64) -> bool;

    fn constant(&self, fraction: f64) -> f64;

    fn solve(
        &self,
        norm: &N,
        points: &[Vec<f64>],
        weights: &[f64],
        fraction: f64,
        r: f64,
    ) -> Result<Option<CandidateBall>>;
}

impl<N: NormedSpace + ?Sized> FractionSolver<N> for Box<dyn FractionSolver<N> + '_> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn accepts(&self, fraction: f64) -> bool {
        (**self).accepts(fraction)
    }
    fn constant(&self, fraction: f64) -> f64 {
        (**self).constant(fraction)
    }
    fn solve(
        &self,
        norm: &N,
        points: &[Vec<f64>],
        weights: &[f64],
        fraction: f64,
        r: f64,
    ) -> Result<Option<CandidateBall>> {
        (**self).solve(norm, points, weights, fraction, r)
    }
}

/// Balls each holding `fraction` of the original weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub balls: Vec<CandidateBall>,
    pub fraction: f64,
    pub approx_constant: f64,
    /// True when every radius-`r` ball holding `fraction` of the weight is
    /// known to touch a listed ball, given only the inner solver's contract:
    /// peeling stopped because the remaining weight fell below `fraction * w`.
    /// False when the loop stopped on a failed solve or verification, or
    /// (for the gap cover) when the guarantee rests on the gap hypothesis.
    pub guarantee: bool,
}

impl CoverResult {
    pub fn max_len(fraction: f64) -> usize {
        (1.0 / fraction + 1e-12).floor() as usize
    }
}

fn total(w: &[f64]) -> f64 {
    w.iter().sum()
}

fn weight_within<N: NormedSpace + ?Sized>(norm: &N, points: &[Vec<f64>], w: &[f64], x: &[f64], radius: f64) -> f64 {
    covered_weight_by(w, radius, |i| norm.distance(x, &points[i]))
}

fn zero_within<N: NormedSpace + ?Sized>(norm: &N, points: &[Vec<f64>], w: &mut [f64], x: &[f64], radius: f64) {
    for (i, wi) in w.iter_mut().enumerate() {
        if *wi > 0.0 && norm.distance(x, &points[i]) <= radius {
            *wi = 0.0;
        }
    }
}

// ---------------------------------------------------------------------------
// peeling cover

/// Peeling cover built on `solver`, which must accept every fraction `>= alpha`.
///
/// Finds a ball of radius `c r` holding `beta` of the weight, zeroes the
/// weight inside it, and repeats on the rest with the fraction rescaled to
/// keep the absolute target `beta w`. At most `floor(1/beta)` balls.
pub fn ball_cover<N, S>(
    solver: &S,
    norm: &N,
    ps: &WeightedPointSet<Vec<f64>>,
    alpha: f64,
    beta: f64,
    c: f64,
    r: f64,
) -> Result<CoverResult>
where
    N: NormedSpace + ?Sized,
    S: FractionSolver<N> + ?Sized,
{
    if !(alpha > 0.0 && alpha <= beta && beta <= 1.0) {
        return invalid(format!("need 0 < alpha <= beta <= 1, got alpha {alpha}, beta {beta}"));
    }
    if !solver.accepts(alpha) {
        return Err(Error::UnsupportedFraction { alpha, reason: "inner solver does not accept this fraction" });
    }
    if !(c >= 1.0) {
        return invalid(format!("approximation constant must be >= 1, got {c}"));
    }
    check_radius(r)?;
    ps.require_positive_total()?;
    cover_slices(solver, norm, ps.points(), ps.weights(), beta, c, r)
}

pub(crate) fn cover_slices<N, S>(
    solver: &S,
    norm: &N,
    points: &[Vec<f64>],
    weights: &[f64],
    beta: f64,
    c: f64,
    r: f64,
) -> Result<CoverResult>
where
    N: NormedSpace + ?Sized,
    S: FractionSolver<N> + ?Sized,
{
    let w0 = total(weights);
    let need = beta * w0;
    let slack = WEIGHT_SLACK * w0;
    let mut w = weights.to_vec();
    let mut balls = Vec::new();
    let mut guarantee = false;
    let radius = c * r;
    loop {
        let remaining = total(&w);
        if remaining <= 0.0 || need - slack > remaining {
            guarantee = true;
            break;
        }
        if balls.len() >= CoverResult::max_len(beta) {
            break;
        }
        let fraction = (need / remaining).min(1.0);
        let Some(found) = solver.solve(norm, points, &w, fraction, r)? else { break };
        let center = found.center.coords(points).to_vec();
        let covered = weight_within(norm, points, &w, &center, radius);
        if covered < need - slack {
            break;
        }
        zero_within(norm, points, &mut w, &center, radius);
        balls.push(CandidateBall { center: Center::Point(center), radius, covered_weight: covered });
    }
    Ok(CoverResult { balls, fraction: beta, approx_constant: c, guarantee })
}

// ---------------------------------------------------------------------------
// alpha > 1/2 solver as a FractionSolver

/// [`halfplus::cluster_halfplus`] behind the [`FractionSolver`] interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfPlus;

impl<N: NormedSpace + ?Sized> FractionSolver<N> for HalfPlus {
    fn name(&self) -> &'static str {
        "halfplus"
    }
    fn accepts(&self, fraction: f64) -> bool {
        fraction > 0.5 && fraction <= 1.0
    }
    fn constant(&self, fraction: f64) -> f64 {
        halfplus_constant(fraction)
    }
    fn solve(
        &self,
        norm: &N,
        points: &[Vec<f64>],
        weights: &[f64],
        fraction: f64,
        r: f64,
    ) -> Result<Option<CandidateBall>> {
        if total(weights) <= 0.0 {
            return Ok(None);
        }
        let ctx = Normed { points, norm };
        let idx: Vec<usize> = (0..points.len()).collect();
        let center = halfplus::solve(&ctx, &idx, weights, fraction, r);
        let radius = halfplus_constant(fraction) * r;
        let covered_weight = weight_within(norm, points, weights, &center, radius);
        Ok(Some(CandidateBall { center: Center::Point(center), radius, covered_weight }))
    }
}

// ---------------------------------------------------------------------------
// gap-condition cover

/// `C = 2 + 2/alpha` for the gap cover.
pub fn gap_constant(alpha: f64) -> f64 {
    2.0 + 2.0 / alpha
}

/// Radius multiple of the shell in the gap hypothesis: `2C + 3`.
pub fn gap_shell_factor(alpha: f64) -> f64 {
    2.0 * gap_constant(alpha) + 3.0
}

/// Constant of the inner `alpha > 1/2` call after restricting to the
/// `(C+2) r` ball around a guess holding `beta` of the weight: `2 + 2 beta / alpha`.
pub fn restricted_constant(alpha: f64, beta: f64) -> f64 {
    halfplus_constant((beta + alpha) / (2.0 * beta))
}

/// Cover under the gap hypothesis, with `C = 2 + 2/alpha`.
///
/// Returns at most `floor(1/alpha)` balls of radius `C r`, each holding
/// `alpha` of the weight. If some radius-`r` ball `B` outweighs the shell
/// between it and its `(2C+3) r` concentric ball by `alpha w`, one of the
/// returned balls meets `B`.
pub fn below_half_cover<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    alpha: f64,
    r: f64,
) -> Result<CoverResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    check_radius(r)?;
    ps.require_positive_total()?;
    ps.dimension()?;
    let c = gap_constant(alpha);
    Ok(gap_cover_slices(norm, ps.points(), ps.weights(), alpha, c, r))
}

pub(crate) fn gap_cover_slices<N: NormedSpace + ?Sized>(
    norm: &N,
    points: &[Vec<f64>],
    weights: &[f64],
    alpha: f64,
    c: f64,
    r: f64,
) -> CoverResult {
    let gap = GapCover { ctx: Normed { points, norm }, c, r };
    let padded = points.len().next_power_of_two();
    let found = gap.cover(0, padded, weights, alpha);
    let balls = found
        .into_iter()
        .map(|(x, covered)| CandidateBall { center: Center::Point(x), radius: c * r, covered_weight: covered })
        .collect();
    CoverResult { balls, fraction: alpha, approx_constant: c, guarantee: false }
}

struct GapCover<'a, N: ?Sized> {
    ctx: Normed<'a, N>,
    c: f64,
    r: f64,
}

impl<N: NormedSpace + ?Sized> GapCover<'_, N> {
    /// Cover of the block `[lo, lo + span)` of the zero-padded input; `w`
    /// holds the weights of its real members (`lo .. lo + w.len()`).
    fn cover(&self, lo: usize, span: usize, w: &[f64], alpha: f64) -> Vec<(Vec<f64>, f64)> {
        let total = total(w);
        if total <= 0.0 {
            return Vec::new();
        }
        if span == 1 {
            return vec![(self.ctx.points[lo].clone(), total)];
        }
        let half = span / 2;
        let split = w.len().min(half);
        let mut guesses = self.cover(lo, half, &w[..split], alpha);
        if w.len() > half {
            guesses.extend(self.cover(lo + half, half, &w[half..], alpha));
        }

        let slack = WEIGHT_SLACK * total;
        let idx: Vec<usize> = (lo..lo + w.len()).collect();
        let cr = self.c * self.r;
        let mut found = None;
        for (z, _) in &guesses {
            let mut sub_idx = Vec::new();
            let mut sub_w = Vec::new();
            for (&i, &wi) in idx.iter().zip(w) {
                if wi > 0.0 && self.ctx.dist_to(z, i) <= (self.c + 2.0) * self.r {
                    sub_idx.push(i);
                    sub_w.push(wi);
                }
            }
            let beta = total_of(&sub_w) / total;
            if beta * total < alpha * total - slack || sub_idx.is_empty() {
                continue;
            }
            let fraction = ((beta + alpha) / (2.0 * beta)).min(1.0);
            let x = halfplus::solve(&self.ctx, &sub_idx, &sub_w, fraction, self.r);
            let covered = self.ctx.subset_weight_within(&idx, w, &x, cr);
            if covered >= alpha * total - slack {
                found = Some((x, covered));
                break;
            }
        }
        let Some((x, covered)) = found else { return Vec::new() };
        if alpha > 0.5 {
            return vec![(x, covered)];
        }

        let mut peeled = w.to_vec();
        for (&i, wi) in idx.iter().zip(peeled.iter_mut()) {
            if *wi > 0.0 && self.ctx.dist_to(&x, i) <= cr {
                *wi = 0.0;
            }
        }
        let remaining = total - covered;
        let next_alpha = alpha * total / remaining;
        let mut out = vec![(x, covered)];
        if remaining > slack && next_alpha <= 1.0 {
            out.extend(self.cover(lo, span, &peeled, next_alpha));
        }
        out
    }
}

fn total_of(w: &[f64]) -> f64 {
    w.iter().sum()
}

// ---------------------------------------------------------------------------
// any alpha: search over scales

/// `floor(ln(1/alpha) / ln(3/2))`, the largest scale index worth trying.
pub fn max_scale(alpha: f64) -> u32 {
    ((1.0 / alpha).ln() / 1.5f64.ln() + 1e-9).floor() as u32
}

/// Growth factor between consecutive scales: `8/alpha + 7`.
pub fn scale_factor(alpha: f64) -> f64 {
    8.0 / alpha + 7.0
}

/// Verification radius multiple at scale `s`: `(4/alpha + 4) (8/alpha + 7)^s`.
pub fn scale_radius_factor(alpha: f64, s: u32) -> f64 {
    (4.0 / alpha + 4.0) * scale_factor(alpha).powi(s as i32)
}

/// Constant of [`cluster_any_alpha`] at `alpha`: the largest scale's radius.
pub fn any_alpha_constant(alpha: f64) -> f64 {
    scale_radius_factor(alpha, max_scale(alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledBall {
    pub ball: CandidateBall,
    pub scale: u32,
}

/// Verified ball holding `alpha` of the weight, trying scales
/// `s = 0, 1, ..., max_scale(alpha)` with the gap cover at fraction
/// `alpha / 2` and radius `(8/alpha + 7)^s r`. `None` when no scale
/// verifies, which means no radius-`r` ball holds `alpha` of the weight.
pub fn cluster_any_alpha<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    alpha: f64,
    r: f64,
) -> Result<Option<ScaledBall>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    check_radius(r)?;
    ps.require_positive_total()?;
    ps.dimension()?;
    Ok(any_alpha_slices(norm, ps.points(), ps.weights(), alpha, r))
}

fn any_alpha_slices<N: NormedSpace + ?Sized>(
    norm: &N,
    points: &[Vec<f64>],
    weights: &[f64],
    alpha: f64,
    r: f64,
) -> Option<ScaledBall> {
    let w = total(weights);
    let need = alpha * w - WEIGHT_SLACK * w;
    let beta = alpha / 2.0;
    let c = gap_constant(beta);
    for s in 0..=max_scale(alpha) {
        let big_r = scale_factor(alpha).powi(s as i32) * r;
        let cover = gap_cover_slices(norm, points, weights, beta, c, big_r);
        let radius = scale_radius_factor(alpha, s) * r;
        for ball in cover.balls {
            let x = ball.center.coords(points);
            let covered = weight_within(norm, points, weights, x, radius);
            if covered >= need {
                return Some(ScaledBall {
                    ball: CandidateBall { center: ball.center, radius, covered_weight: covered },
                    scale: s,
                });
            }
        }
    }
    None
}

/// [`cluster_any_alpha`] behind the [`FractionSolver`] interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnyAlpha;

impl<N: NormedSpace + ?Sized> FractionSolver<N> for AnyAlpha {
    fn name(&self) -> &'static str {
        "any-alpha"
    }
    fn accepts(&self, fraction: f64) -> bool {
        fraction > 0.0 && fraction <= 1.0
    }
    fn constant(&self, fraction: f64) -> f64 {
        any_alpha_constant(fraction.min(1.0 - 1e-12))
    }
    fn solve(
        &self,
        norm: &N,
        points: &[Vec<f64>],
        weights: &[f64],
        fraction: f64,
        r: f64,
    ) -> Result<Option<CandidateBall>> {
        if total(weights) <= 0.0 {
            return Ok(None);
        }
        // the scale search needs alpha < 1; a full-weight target is no harder
        let fraction = fraction.min(1.0 - 1e-12);
        Ok(any_alpha_slices(norm, points, weights, fraction, r).map(|s| s.ball))
    }
}

// ---------------------------------------------------------------------------
// bucket reduction

/// Bucket size function `g(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketSize {
    /// `g(n) = n`: one bucket.
    Identity,
    /// `g(n) = min(n, ceil(max(log2 n, t)^e))`. The floor
    /// `t = 1 + 1/(2^(1/e) - 1)` keeps `g(2n) <= 2 g(n)` for small `n`.
    PolyLog(u32),
}

impl BucketSize {
    pub fn eval(&self, n: usize) -> usize {
        match *self {
            BucketSize::Identity => n.max(1),
            BucketSize::PolyLog(0) => 1,
            BucketSize::PolyLog(e) => {
                let t = 1.0 + 1.0 / (2f64.powf(1.0 / e as f64) - 1.0);
                let v = (n.max(1) as f64).log2().max(t).powi(e as i32).ceil() as usize;
                v.clamp(1, n.max(1))
            }
        }
    }
}

/// Checks the standing assumptions on size functions up to `n`:
/// `1 <= g(m) <= m`, nondecreasing, and `g(2m) <= 2 g(m)`.
pub fn validate_size_function(g: &dyn Fn(usize) -> usize, n: usize) -> Result<()> {
    let mut probes: Vec<usize> = (1..=n.min(64)).collect();
    let mut p = 64;
    while p < n {
        probes.extend([p, p + 1, p.saturating_sub(1)]);
        p *= 2;
    }
    probes.push(n);
    for m in probes.into_iter().filter(|m| (1..=n).contains(m)) {
        let gm = g(m);
        if gm < 1 || gm > m {
            return invalid(format!("bucket size g({m}) = {gm} is outside [1, {m}]"));
        }
        if m < n && g(m + 1) < gm {
            return invalid(format!("bucket size function decreases at {m}"));
        }
        if 2 * m <= n && g(2 * m) > 2 * gm {
            return invalid(format!("g(2 * {m}) > 2 g({m})"));
        }
    }
    Ok(())
}

/// Contiguous buckets of size `ceil(n / ceil(n / g(n)))`; the last may be shorter.
pub fn bucket_ranges(n: usize, g: usize) -> Vec<std::ops::Range<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let count = n.div_ceil(g.max(1));
    let size = n.div_ceil(count);
    (0..n).step_by(size).map(|s| s..(s + size).min(n)).collect()
}

/// `C' = C^2 + 2C + 2`.
pub fn bucket_constant(c: f64) -> f64 {
    c * c + 2.0 * c + 2.0
}

/// Fraction solved by one bucket reduction over an `alpha` solver: `sqrt(2 alpha)`.
pub fn lifted_fraction(alpha: f64) -> f64 {
    (2.0 * alpha).sqrt()
}

/// One bucket reduction.
///
/// `inner` solves fraction `alpha` (and above) with constant
/// `C = inner.constant(alpha)`. The result solves fraction
/// `sqrt(2 alpha)`: a returned ball has radius `(C^2 + 2C + 2) r` and was
/// verified against the full set.
pub fn bucket_reduce<N, S>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    alpha: f64,
    r: f64,
    g: &dyn Fn(usize) -> usize,
    inner: &S,
) -> Result<Option<CandidateBall>>
where
    N: NormedSpace + ?Sized,
    S: FractionSolver<N> + ?Sized,
{
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::UnsupportedFraction { alpha, reason: "bucket reduction needs alpha in (0, 1/2]" });
    }
    if !inner.accepts(alpha) {
        return Err(Error::UnsupportedFraction { alpha, reason: "inner solver does not accept this fraction" });
    }
    check_radius(r)?;
    ps.require_positive_total()?;
    ps.dimension()?;
    validate_size_function(g, ps.len())?;
    bucket_slices(norm, ps.points(), ps.weights(), alpha, r, g(ps.len()), inner)
}

fn bucket_slices<N, S>(
    norm: &N,
    points: &[Vec<f64>],
    weights: &[f64],
    alpha: f64,
    r: f64,
    g: usize,
    inner: &S,
) -> Result<Option<CandidateBall>>
where
    N: NormedSpace + ?Sized,
    S: FractionSolver<N> + ?Sized,
{
    let lifted = lifted_fraction(alpha);
    let c = inner.constant(alpha);

    let mut reps = Vec::new();
    let mut rep_w = Vec::new();
    for range in bucket_ranges(points.len(), g) {
        let bucket_w = total(&weights[range.clone()]);
        if bucket_w <= 0.0 {
            continue;
        }
        let cover = cover_slices(inner, norm, &points[range.clone()], &weights[range], lifted, c, r)?;
        for ball in cover.balls {
            if let Center::Point(x) = ball.center {
                reps.push(x);
                rep_w.push(bucket_w);
            }
        }
    }
    if reps.is_empty() {
        return Ok(None);
    }

    let finalists = cover_slices(inner, norm, &reps, &rep_w, alpha, c, (c + 1.0) * r)?;
    let w = total(weights);
    let radius = bucket_constant(c) * r;
    for ball in finalists.balls {
        let x = ball.center.coords(&reps);
        let covered = weight_within(norm, points, weights, x, radius);
        if covered >= lifted * w - WEIGHT_SLACK * w {
            return Ok(Some(CandidateBall { center: ball.center, radius, covered_weight: covered }));
        }
    }
    Ok(None)
}

/// A bucket reduction stacked on `inner`, as a [`FractionSolver`].
///
/// Asked for fraction `f`, it runs the inner solver at `f^2 / 2`.
pub struct BucketReduce<S> {
    pub inner: S,
    pub bucket: BucketSize,
}

impl<N, S> FractionSolver<N> for BucketReduce<S>
where
    N: NormedSpace + ?Sized,
    S: FractionSolver<N>,
{
    fn name(&self) -> &'static str {
        "bucket-reduce"
    }
    fn accepts(&self, fraction: f64) -> bool {
        fraction > 0.0 && fraction <= 1.0 && self.inner.accepts(fraction * fraction / 2.0)
    }
    fn constant(&self, fraction: f64) -> f64 {
        bucket_constant(self.inner.constant(fraction * fraction / 2.0))
    }
    fn solve(
        &self,
        norm: &N,
        points: &[Vec<f64>],
        weights: &[f64],
        fraction: f64,
        r: f64,
    ) -> Result<Option<CandidateBall>> {
        if total(weights) <= 0.0 {
            return Ok(None);
        }
        let g = self.bucket.eval(points.len());
        bucket_slices(norm, points, weights, fraction * fraction / 2.0, r, g, &self.inner)
    }
}

// ---------------------------------------------------------------------------
// iterated composition

/// Base fraction of a depth-`k` stack targeting `beta`: `(beta/2)^(2^k) / 2`.
pub fn logtower_base_fraction(beta: f64, k: u32) -> f64 {
    (beta / 2.0).powi(1 << k) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogTowerResult {
    pub ball: CandidateBall,
    pub fraction: f64,
    pub approx_constant: f64,
    pub base_fraction: f64,
    pub depth: u32,
}

/// `k` bucket reductions over [`AnyAlpha`]; `k = 0` is [`cluster_any_alpha`].
/// Uses `BucketSize::PolyLog(2)` buckets.
pub fn cluster_logtower<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    beta: f64,
    k: u32,
    r: f64,
) -> Result<Option<LogTowerResult>> {
    cluster_logtower_with(ps, norm, beta, k, r, BucketSize::PolyLog(2))
}

pub fn cluster_logtower_with<N: NormedSpace + ?Sized>(
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &N,
    beta: f64,
    k: u32,
    r: f64,
    bucket: BucketSize,
) -> Result<Option<LogTowerResult>> {
    if !(beta > 0.0 && beta < 1.0) {
        return invalid(format!("beta must lie in (0, 1), got {beta}"));
    }
    if k > 4 {
        return invalid(format!("depth {k} is beyond any useful composition"));
    }
    check_radius(r)?;
    ps.require_positive_total()?;
    ps.dimension()?;
    validate_size_function(&|m| bucket.eval(m), ps.len())?;

    let solver = logtower_stack::<N>(k, bucket);
    let base_fraction = logtower_base_fraction(beta, k);
    debug_assert!(solver.accepts(beta));
    let ball = solver.solve(norm, ps.points(), ps.weights(), beta, r)?;
    Ok(ball.map(|ball| LogTowerResult {
        ball,
        fraction: beta,
        approx_constant: solver.constant(beta),
        base_fraction,
        depth: k,
    }))
}

/// The solver stack used by [`cluster_logtower`].
pub fn logtower_stack<'a, N: NormedSpace + ?Sized + 'a>(k: u32, bucket: BucketSize) -> Box<dyn FractionSolver<N> + 'a> {
    let mut solver: Box<dyn FractionSolver<N> + 'a> = Box::new(AnyAlpha);
    for _ in 0..k {
        solver = Box::new(BucketReduce { inner: solver, bucket });
    }
    solver
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LpNorm;

    #[test]
    fn formula_identities() {
        for alpha in [0.05, 0.1, 0.3, 0.5, 0.8] {
            let beta = alpha / 2.0;
            let c = gap_constant(beta);
            assert!((2.0 * c + 3.0 - scale_factor(alpha)).abs() < 1e-9 * scale_factor(alpha));
            assert!((c + 2.0 - scale_radius_factor(alpha, 0)).abs() < 1e-9 * c);
        }
        assert_eq!(max_scale(0.5), 1);
        assert_eq!(gap_constant(0.25), 10.0);
        assert_eq!(gap_shell_factor(0.25), 23.0);
        assert_eq!(bucket_constant(6.0), 50.0);
        assert!((logtower_base_fraction(0.8, 1) - 0.08).abs() < 1e-15);
        assert_eq!(logtower_base_fraction(0.8, 0), 0.2);
        assert!((lifted_fraction(0.32) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn restricted_fraction_arithmetic() {
        for alpha in [0.1, 0.25, 0.4, 0.6, 0.9] {
            for beta in [alpha, (alpha + 1.0) / 2.0, 1.0] {
                let f = (beta + alpha) / (2.0 * beta);
                assert!(f >= (1.0 + alpha) / 2.0 - 1e-15 && f > 0.5);
                let c = restricted_constant(alpha, beta);
                assert!((c - (2.0 + 2.0 * beta / alpha)).abs() < 1e-9 * c);
                assert!(c <= gap_constant(alpha) + 1e-9);
            }
        }
    }

    #[test]
    fn bucket_ranges_cover_contiguously() {
        let r = bucket_ranges(10, 3);
        assert_eq!(r, vec![0..3, 3..6, 6..9, 9..10]);
        assert_eq!(bucket_ranges(7, 7), vec![0..7]);
        assert_eq!(bucket_ranges(7, 100), vec![0..7]);
        let r = bucket_ranges(100, 9);
        assert_eq!(r.iter().map(|x| x.len()).sum::<usize>(), 100);
        assert!(r.windows(2).all(|p| p[0].end == p[1].start));
    }

    #[test]
    fn size_function_checks() {
        for e in 0..5 {
            assert!(validate_size_function(&|m| BucketSize::PolyLog(e).eval(m), 5000).is_ok());
        }
        assert!(validate_size_function(&|m| BucketSize::Identity.eval(m), 5000).is_ok());
        assert!(validate_size_function(&|_| 0, 10).is_err());
        assert!(validate_size_function(&|m| m + 1, 10).is_err());
        assert!(validate_size_function(&|m| if m > 5 { 1 } else { m }, 10).is_err());
        assert!(validate_size_function(&|m| if m >= 8 { m } else { 1 }, 20).is_err());
    }

    #[test]
    fn single_point_gap_cover() {
        let ps = WeightedPointSet::uniform(vec![vec![2.0, 2.0]]);
        let cover = below_half_cover(&ps, &LpNorm::euclidean(), 0.3, 1.0).unwrap();
        assert_eq!(cover.balls.len(), 1);
        assert_eq!(cover.balls[0].center, Center::Point(vec![2.0, 2.0]));
        assert_eq!(cover.balls[0].radius, gap_constant(0.3));
    }

    #[test]
    fn identical_points_any_alpha() {
        let ps = WeightedPointSet::uniform(vec![vec![1.0, 0.0]; 37]);
        let got = cluster_any_alpha(&ps, &LpNorm::euclidean(), 0.3, 1.0).unwrap().unwrap();
        assert_eq!(got.scale, 0);
        assert_eq!(got.ball.covered_weight, 37.0);
    }

    #[test]
    fn halfplus_cover_has_one_ball() {
        let mut pts = vec![vec![0.0]; 6];
        pts.extend((0..4).map(|i| vec![100.0 * (i + 1) as f64]));
        let ps = WeightedPointSet::uniform(pts);
        let cover = ball_cover(&HalfPlus, &LpNorm::euclidean(), &ps, 0.6, 0.6, 6.0, 1.0).unwrap();
        assert_eq!(cover.balls.len(), 1);
        assert!(cover.guarantee);
        assert!(ball_cover(&HalfPlus, &LpNorm::euclidean(), &ps, 0.4, 0.4, 6.0, 1.0).is_err());
    }

    #[test]
    fn no_dense_ball_yields_empty_or_verified_output() {
        // ten points 100 apart: no radius-1 ball holds 30% of the weight
        let ps = WeightedPointSet::uniform((0..10).map(|i| vec![100.0 * i as f64]).collect());
        let l2 = LpNorm::euclidean();
        let cover =
            ball_cover(&AnyAlpha, &l2, &ps, 0.3, 0.3, FractionSolver::<LpNorm>::constant(&AnyAlpha, 0.3), 1.0).unwrap();
        for b in &cover.balls {
            assert!(b.covered_weight >= 3.0);
        }
        let gap = below_half_cover(&ps, &l2, 0.3, 1.0).unwrap();
        assert!(gap.balls.is_empty());
    }

    #[test]
    fn bucket_reduce_rejects_large_alpha() {
        let ps = WeightedPointSet::uniform(vec![vec![0.0]; 4]);
        let g = |m: usize| m;
        let err = bucket_reduce(&ps, &LpNorm::euclidean(), 0.6, 1.0, &g, &AnyAlpha).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFraction { .. }));
    }

    #[test]
    fn single_bucket_reduces_to_inner_plus_verification() {
        let mut pts = vec![vec![0.0, 0.0]; 30];
        pts.extend((0..70).map(|i| vec![1000.0 + 50.0 * i as f64, 0.0]));
        let ps = WeightedPointSet::uniform(pts);
        let l2 = LpNorm::euclidean();
        let g = |m: usize| m;
        let ball = bucket_reduce(&ps, &l2, 0.045, 1.0, &g, &AnyAlpha).unwrap().unwrap();
        assert!(ball.covered_weight >= lifted_fraction(0.045) * 100.0);
        let c = bucket_constant(any_alpha_constant(0.045));
        assert!((ball.radius - c).abs() <= 1e-12 * c);
    }
}
