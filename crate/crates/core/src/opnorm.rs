//! Square matrices under the operator (spectral) norm, and the sign-matrix
//! ensemble on which the coordinate-wise median fails.
//!
//! Take every `k x k` matrix with entries in `{-1, +1}` except the all `-1`
//! one. Each coordinate has one more `+1` than `-1`, so the coordinate
//! median is the all-ones matrix, whose operator norm is `k`. Most ensemble
//! members have norm near `2 sqrt(k)`, so the median lands about
//! `sqrt(k) / 2` times further from the origin than a typical member.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::select::weighted_median;
use crate::space::NormedSpace;

/// Largest side length handled by the Jacobi eigen-solver.
pub const JACOBI_LIMIT: usize = 8;
/// Largest side length for which the ensemble is enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 4;

const MAX_POWER_ITERATIONS: usize = 100_000;
const STALL_ROUNDS: usize = 50;

/// Row-major `k x k` matrices flattened to `k^2` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub k: usize,
    pub tol: f64,
}

impl OperatorNorm {
    pub fn new(k: usize, tol: f64) -> Result<Self> {
        if k == 0 {
            return invalid("matrix side length must be positive");
        }
        if !(tol > 0.0) {
            return invalid(format!("tolerance must be positive, got {tol}"));
        }
        Ok(Self { k, tol })
    }
}

impl NormedSpace for OperatorNorm {
    fn norm(&self, x: &[f64]) -> f64 {
        match operator_norm(x, self.k, self.tol) {
            Ok(v) => v,
            Err(Error::Convergence { estimate, .. }) => estimate,
            Err(e) => panic!("operator norm of a {}-entry vector: {e}", x.len()),
        }
    }
}

/// `M^T M` for a row-major `k x k` matrix.
fn gram(m: &[f64], k: usize) -> Vec<f64> {
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let s: f64 = (0..k).map(|r| m[r * k + i] * m[r * k + j]).sum();
            g[i * k + j] = s;
            g[j * k + i] = s;
        }
    }
    g
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<f64>, k: usize) -> Vec<f64> {
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>();
    for _ in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * k + j].powi(2))
            .sum();
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r * k + p], a[r * k + q]);
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p * k + r], a[q * k + r]);
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
            }
        }
    }
    (0..k).map(|i| a[i * k + i]).collect()
}

fn apply_gram(m: &[f64], k: usize, v: &[f64], tmp: &mut [f64], out: &mut [f64]) {
    for (r, t) in tmp.iter_mut().enumerate() {
        *t = (0..k).map(|c| m[r * k + c] * v[c]).sum();
    }
    for (c, o) in out.iter_mut().enumerate() {
        *o = (0..k).map(|r| m[r * k + c] * tmp[r]).sum();
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len > 0.0 {
        v.iter_mut().for_each(|x| *x /= len);
    }
    len
}

/// Power iteration on `M^T M` from the all-ones vector. Stops when the
/// relative residual of the Rayleigh quotient is within `tol`. If the
/// quotient gains less than `tol^2` relative over 50 rounds, the iterate is
/// restarted once from a fixed perturbation pattern; a second stall accepts
/// the best quotient seen.
fn power_norm(m: &[f64], k: usize, tol: f64) -> Result<f64> {
    let mut v = vec![1.0; k];
    normalize(&mut v);
    let mut tmp = vec![0.0; k];
    let mut u = vec![0.0; k];
    let mut best = 0.0f64;
    let mut anchor = 0.0f64;
    let mut since = 0;
    let mut restarted = false;
    for _ in 0..MAX_POWER_ITERATIONS {
        apply_gram(m, k, &v, &mut tmp, &mut u);
        let lambda: f64 = v.iter().zip(&u).map(|(a, b)| a * b).sum();
        if lambda <= 0.0 {
            // v is in the null space; M may still be nonzero
            if restarted || m.iter().all(|x| *x == 0.0) {
                return Ok(best.sqrt());
            }
            restarted = true;
            v = (0..k).map(|i| 1.0 + 0.5 * ((i % 3) as f64 - 1.0) + 0.25 * ((i % 7) as f64 / 7.0)).collect();
            normalize(&mut v);
            continue;
        }
        best = best.max(lambda);
        let residual = v.iter().zip(&u).map(|(a, b)| (b - lambda * a).powi(2)).sum::<f64>().sqrt() / lambda;
        if residual <= tol {
            return Ok(best.sqrt());
        }
        if lambda > anchor * (1.0 + tol * tol) {
            anchor = lambda;
            since = 0;
        } else {
            since += 1;
            if since >= STALL_ROUNDS {
                if restarted {
                    return Ok(best.sqrt());
                }
                restarted = true;
                since = 0;
                u = (0..k).map(|i| u[i] * (1.0 + 0.5 * ((i % 3) as f64 - 1.0))).collect();
            }
        }
        v.copy_from_slice(&u);
        normalize(&mut v);
    }
    Err(Error::Convergence { iterations: MAX_POWER_ITERATIONS, estimate: best.sqrt() })
}

/// True when every 2x2 minor vanishes exactly.
fn is_rank_one(m: &[f64], k: usize) -> bool {
    let Some(p) = m.iter().position(|x| *x != 0.0) else { return false };
    let (pr, pc) = (p / k, p % k);
    (0..k).all(|r| (0..k).all(|c| m[r * k + c] * m[p] == m[r * k + pc] * m[pr * k + c]))
}

/// Largest singular value of the row-major `k x k` matrix `m`. Exact up to
/// rounding for `k <= JACOBI_LIMIT`, otherwise within relative `tol`.
/// Rank-one matrices take the Frobenius norm, which equals the operator norm
/// there.
pub fn operator_norm(m: &[f64], k: usize, tol: f64) -> Result<f64> {
    if m.len() != k * k {
        return invalid(format!("expected {} entries for k = {k}, got {}", k * k, m.len()));
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    if k == 0 {
        return Ok(0.0);
    }
    if is_rank_one(m, k) {
        return Ok(m.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    if k <= JACOBI_LIMIT {
        let ev = jacobi_eigenvalues(gram(m, k), k);
        return Ok(ev.into_iter().fold(0.0f64, f64::max).sqrt());
    }
    power_norm(m, k, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Enumeration {
    /// All `2^(k^2) - 1` members; needs `k <= EXHAUSTIVE_LIMIT`.
    Exhaustive,
    /// Uniform seeded draws from the ensemble.
    Sampled { count: usize, seed: u64 },
}

/// Sign matrices `k x k`, all-`-1` excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrixEnsemble {
    pub k: usize,
    pub enumeration: Enumeration,
}

impl SignMatrixEnsemble {
    pub fn new(k: usize, enumeration: Enumeration) -> Result<Self> {
        if k < 2 {
            return invalid("side length must be at least 2");
        }
        if enumeration == Enumeration::Exhaustive && k > EXHAUSTIVE_LIMIT {
            return invalid(format!("exhaustive enumeration needs k <= {EXHAUSTIVE_LIMIT}"));
        }
        if let Enumeration::Sampled { count: 0, .. } = enumeration {
            return invalid("sample count must be positive");
        }
        Ok(Self { k, enumeration })
    }

    pub fn dimension(&self) -> usize {
        self.k * self.k
    }

    /// Number of members enumerated (or sampled).
    pub fn len(&self) -> usize {
        match self.enumeration {
            Enumeration::Exhaustive => (1usize << self.dimension()) - 1,
            Enumeration::Sampled { count, .. } => count,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Members as row-major `+-1` matrices. Exhaustive order: bit `i` of
    /// `1..2^d` set means entry `i` is `+1`.
    pub fn members(&self) -> Vec<Vec<f64>> {
        let d = self.dimension();
        match self.enumeration {
            Enumeration::Exhaustive => (1u64..1 << d)
                .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect())
                .collect(),
            Enumeration::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let m: Vec<f64> = (0..d).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
                    if m.iter().any(|x| *x > 0.0) {
                        out.push(m);
                    }
                }
                out
            }
        }
    }

    /// Per coordinate, `#(+1) - #(-1)` over the whole ensemble: every
    /// coordinate is `+1` in `2^(d-1)` members and `-1` in `2^(d-1) - 1`.
    pub fn coordinate_surplus(&self) -> Vec<i64> {
        vec![1; self.dimension()]
    }

    /// Coordinate-wise median of the whole ensemble, from the exact counts.
    pub fn coordinate_median(&self) -> Vec<f64> {
        self.coordinate_surplus().into_iter().map(|s| if s > 0 { 1.0 } else { -1.0 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub q: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub c: f64,
    /// `c sqrt(k)`.
    pub bound: f64,
    pub fraction_within: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianReport {
    pub k: usize,
    pub enumeration: Enumeration,
    pub members: usize,
    pub median_is_all_ones: bool,
    pub median_norm: f64,
    pub max_norm: f64,
    pub quantiles: Vec<Quantile>,
    pub thresholds: Vec<Threshold>,
    /// Median-output norm over the 90th-percentile member norm.
    pub ratio_to_p90: f64,
    /// `sqrt(k) / c` for each threshold: how far the median sits beyond
    /// `c sqrt(k)` in units of that bound.
    pub growth: Vec<f64>,
}

pub const REPORT_QUANTILES: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0];
pub const REPORT_THRESHOLDS: [f64; 3] = [2.0, 2.1, 2.5];

/// Nearest-rank quantile of sorted data.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Operator norms of every member, computed in parallel; the order matches
/// `members`.
pub fn member_norms(members: &[Vec<f64>], k: usize, tol: f64) -> Result<Vec<f64>> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(members.len().max(1));
    let chunk = members.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = members
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|m| operator_norm(m, k, tol)).collect::<Result<Vec<_>>>()))
            .collect();
        let mut out = Vec::with_capacity(members.len());
        for h in handles {
            out.extend(h.join().expect("norm worker panicked")?);
        }
        Ok(out)
    })
}

pub fn median_counterexample_report(ensemble: &SignMatrixEnsemble, tol: f64) -> Result<MedianReport> {
    let k = ensemble.k;
    let members = ensemble.members();
    let median = match ensemble.enumeration {
        Enumeration::Exhaustive => {
            let ones = vec![1.0; members.len()];
            let mut column = vec![0.0; members.len()];
            (0..ensemble.dimension())
                .map(|i| {
                    for (c, m) in column.iter_mut().zip(&members) {
                        *c = m[i];
                    }
                    weighted_median(&column, &ones)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Enumeration::Sampled { .. } => ensemble.coordinate_median(),
    };
    let median_is_all_ones = median.iter().all(|x| *x == 1.0);
    let median_norm = operator_norm(&median, k, tol)?;
    let mut norms = member_norms(&members, k, tol)?;
    norms.sort_by(f64::total_cmp);
    let quantiles = REPORT_QUANTILES.iter().map(|&q| Quantile { q, norm: nearest_rank(&norms, q) }).collect();
    let root = (k as f64).sqrt();
    let thresholds = REPORT_THRESHOLDS
        .iter()
        .map(|&c| {
            let bound = c * root;
            let within = norms.partition_point(|x| *x <= bound);
            Threshold { c, bound, fraction_within: within as f64 / norms.len() as f64 }
        })
        .collect();
    Ok(MedianReport {
        k,
        enumeration: ensemble.enumeration,
        members: norms.len(),
        median_is_all_ones,
        median_norm,
        max_norm: *norms.last().expect("ensemble is nonempty"),
        quantiles,
        thresholds,
        ratio_to_p90: median_norm / nearest_rank(&norms, 0.9),
        growth: REPORT_THRESHOLDS.iter().map(|c| root / c).collect(),
    })
}
