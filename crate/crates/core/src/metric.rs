//! Solvers that see the data only through a [`DistanceOracle`], with the
//! ball radius `r` unknown.
//!
//! The input is padded with zero-weight copies of point 0 up to `m^C`
//! points, `m = ceil(n^(1/C))`, and split into `m` contiguous blocks of
//! `m^(C-1)`. Each block is solved recursively at level `C - 1`; level 1 is
//! the quadratic scan over every center. Every candidate a level returns is
//! then scored against its whole parent block by the smallest radius that
//! reaches the weight target, and the best candidate wins. With `alpha > 1/2`
//! one candidate per block suffices and the result is within `2C r`. Below
//! one half the same procedure peels: it zeroes the weight inside the winning
//! ball and reruns on the rest with the same absolute target.
//!
//! Query cost is about `C n^(1 + 1/C)` for the one-half case. Distances to
//! zero-weight points and from a point to itself are never requested.

use serde::{Deserialize, Serialize};

use crate::error::{check_fraction, invalid, Error, Result};
use crate::oracle::{DistanceOracle, Padded};
use crate::points::{CandidateBall, Center, WeightedPointSet};
use crate::select::{radius_for_weight, WEIGHT_SLACK};

/// Balls found by the peeling metric solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCover {
    pub balls: Vec<CandidateBall>,
    pub fraction: f64,
    /// `2C`: every radius-`r` ball holding `fraction` of the weight meets a
    /// listed ball whose radius is at most `approx_constant * r`.
    pub approx_constant: f64,
}

/// Smallest `m` with `m^levels >= n`.
pub fn branching(n: usize, levels: u32) -> Result<usize> {
    if levels == 0 {
        return invalid("the level count C must be at least 1");
    }
    let n = n.max(1);
    let mut m = (n as f64).powf(1.0 / levels as f64).ceil().max(1.0) as usize;
    let reaches = |m: usize| m.checked_pow(levels).is_none_or(|p| p >= n);
    while !reaches(m) {
        m += 1;
    }
    while m > 1 && reaches(m - 1) {
        m -= 1;
    }
    if m.checked_pow(levels).is_none() {
        return invalid(format!("{m}^{levels} overflows"));
    }
    Ok(m)
}

fn check_input<O: DistanceOracle + ?Sized>(ps: &WeightedPointSet<usize>, oracle: &O) -> Result<()> {
    if ps.len() != oracle.size() {
        return invalid(format!("{} weights for an oracle over {} points", ps.len(), oracle.size()));
    }
    if ps.points().iter().enumerate().any(|(i, p)| *p != i) {
        return invalid("metric point sets must be indexed 0..n");
    }
    ps.require_positive_total()
}

struct Scored {
    center: usize,
    radius: f64,
    covered: f64,
    dists: Vec<f64>,
}

struct Engine<'a, O: ?Sized> {
    pad: Padded<'a, O>,
    m: usize,
}

impl<O: DistanceOracle + ?Sized> Engine<'_, O> {
    /// Scores `center` against the block starting at `lo` with local weights `w`.
    fn score(&self, center: usize, lo: usize, w: &[f64], need: f64, reference: f64) -> Scored {
        let mut dists = vec![f64::INFINITY; w.len()];
        let mut d = Vec::with_capacity(w.len());
        let mut wt = Vec::with_capacity(w.len());
        for (j, &wj) in w.iter().enumerate() {
            if wj > 0.0 {
                let x = if lo + j == center { 0.0 } else { self.pad.dist(center, lo + j) };
                dists[j] = x;
                d.push(x);
                wt.push(wj);
            }
        }
        let radius = if d.is_empty() { f64::INFINITY } else { radius_for_weight(&d, &wt, need, reference) };
        let covered = d.iter().zip(&wt).filter(|(x, _)| **x <= radius).map(|(_, w)| w).sum();
        Scored { center, radius, covered, dists }
    }

    /// Best candidate by radius; ties go to the earliest candidate (candidates
    /// arrive in index order).
    fn best(&self, candidates: &[usize], lo: usize, w: &[f64], need: f64, reference: f64) -> Option<Scored> {
        let mut best: Option<Scored> = None;
        for &c in candidates {
            let s = self.score(c, lo, w, need, reference);
            if s.radius.is_finite() && best.as_ref().is_none_or(|b| s.radius < b.radius) {
                best = Some(s);
            }
        }
        best
    }

    fn halfplus(&self, lo: usize, size: usize, level: u32, w: &[f64], alpha: f64) -> Option<Scored> {
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let candidates: Vec<usize> = if level == 1 {
            (lo..lo + size).collect()
        } else {
            let sub = size / self.m;
            (0..self.m)
                .filter_map(|b| {
                    let s = lo + b * sub;
                    self.halfplus(s, sub, level - 1, &w[b * sub..(b + 1) * sub], alpha).map(|x| x.center)
                })
                .collect()
        };
        self.best(&candidates, lo, w, alpha * total, total)
    }

    fn cover(&self, lo: usize, size: usize, level: u32, w: &[f64], alpha: f64) -> Vec<Scored> {
        let total: f64 = w.iter().sum();
        if total <= 0.0 {
            return Vec::new();
        }
        let need = alpha * total;
        let slack = WEIGHT_SLACK * total;
        let max_balls = (1.0 / alpha + 1e-12).floor() as usize;
        let mut w = w.to_vec();
        let mut found = Vec::new();
        while found.len() < max_balls {
            let remaining: f64 = w.iter().sum();
            if remaining <= 0.0 || need - slack > remaining {
                break;
            }
            let fraction = (need / remaining).min(1.0);
            let candidates: Vec<usize> = if level == 1 {
                (lo..lo + size).collect()
            } else {
                let sub = size / self.m;
                let mut c = Vec::new();
                for b in 0..self.m {
                    let part = &w[b * sub..(b + 1) * sub];
                    c.extend(self.cover(lo + b * sub, sub, level - 1, part, fraction).into_iter().map(|s| s.center));
                }
                c
            };
            let Some(best) = self.best(&candidates, lo, &w, need, total) else { break };
            for (wj, dj) in w.iter_mut().zip(&best.dists) {
                if *dj <= best.radius {
                    *wj = 0.0;
                }
            }
            found.push(best);
        }
        found
    }
}

fn padded_weights(ps: &WeightedPointSet<usize>, len: usize) -> Vec<f64> {
    let mut w = ps.weights().to_vec();
    w.resize(len, 0.0);
    w
}

fn to_ball<O: DistanceOracle + ?Sized>(engine: &Engine<'_, O>, s: Scored) -> CandidateBall {
    CandidateBall { center: Center::Index(engine.pad.resolve(s.center)), radius: s.radius, covered_weight: s.covered }
}

/// Single ball for `alpha > 1/2` with unknown `r`: the returned radius is
/// the smallest around its center reaching `alpha w`, and is at most `2C r`
/// for any `r` admitting such a ball.
pub fn metric_halfplus<O: DistanceOracle + ?Sized>(
    ps: &WeightedPointSet<usize>,
    oracle: &O,
    alpha: f64,
    levels: u32,
) -> Result<CandidateBall> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::UnsupportedFraction { alpha, reason: "this solver needs alpha in (1/2, 1]" });
    }
    check_input(ps, oracle)?;
    let m = branching(ps.len(), levels)?;
    let len = m.pow(levels);
    let engine = Engine { pad: Padded::new(oracle, len), m };
    let w = padded_weights(ps, len);
    let best = engine
        .halfplus(0, len, levels, &w, alpha)
        .ok_or_else(|| Error::Degenerate("no block produced a candidate".into()))?;
    Ok(to_ball(&engine, best))
}

/// At most `floor(1/alpha)` balls, each holding `alpha w`; any radius-`r`
/// ball holding `alpha w` meets one of them whose radius is `<= 2C r`.
pub fn metric_cover<O: DistanceOracle + ?Sized>(
    ps: &WeightedPointSet<usize>,
    oracle: &O,
    alpha: f64,
    levels: u32,
) -> Result<MetricCover> {
    check_fraction(alpha, 0.0, 1.0)?;
    check_input(ps, oracle)?;
    let m = branching(ps.len(), levels)?;
    let len = m.pow(levels);
    let engine = Engine { pad: Padded::new(oracle, len), m };
    let w = padded_weights(ps, len);
    let balls = engine.cover(0, len, levels, &w, alpha).into_iter().map(|s| to_ball(&engine, s)).collect();
    Ok(MetricCover { balls, fraction: alpha, approx_constant: 2.0 * levels as f64 })
}

/// Quadratic peeling with a fixed target `y = alpha w`: pick the center
/// needing the smallest radius to reach `y` of the remaining weight, zero
/// that ball, repeat while at least `y` remains.
pub fn metric_quadratic<O: DistanceOracle + ?Sized>(
    ps: &WeightedPointSet<usize>,
    oracle: &O,
    alpha: f64,
) -> Result<MetricCover> {
    check_fraction(alpha, 0.0, 1.0)?;
    check_input(ps, oracle)?;
    let n = ps.len();
    let w0 = ps.total_weight();
    let y = alpha * w0;
    let slack = WEIGHT_SLACK * w0;
    let mut w = ps.weights().to_vec();
    let mut balls = Vec::new();
    loop {
        let remaining: f64 = w.iter().sum();
        if remaining <= 0.0 || y - slack > remaining {
            break;
        }
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for i in 0..n {
            let row: Vec<f64> = (0..n)
                .map(|j| {
                    if w[j] <= 0.0 {
                        f64::INFINITY
                    } else if i == j {
                        0.0
                    } else {
                        oracle.dist(i, j)
                    }
                })
                .collect();
            let (d, wt): (Vec<f64>, Vec<f64>) =
                row.iter().zip(&w).filter(|(_, wj)| **wj > 0.0).map(|(d, wj)| (*d, *wj)).unzip();
            let s = radius_for_weight(&d, &wt, y, w0);
            if s.is_finite() && best.as_ref().is_none_or(|b| s < b.1) {
                best = Some((i, s, row));
            }
        }
        let Some((center, radius, row)) = best else { break };
        let mut covered = 0.0;
        for (wj, dj) in w.iter_mut().zip(&row) {
            if *dj <= radius {
                covered += *wj;
                *wj = 0.0;
            }
        }
        balls.push(CandidateBall { center: Center::Index(center), radius, covered_weight: covered });
    }
    Ok(MetricCover { balls, fraction: alpha, approx_constant: 2.0 })
}
