//! Seeded synthetic instances with a recorded ground-truth ball.
//!
//! Inliers are sampled strictly inside the planted ball (radius at most
//! `r (1 - 1e-9)`), so the recorded coverage survives rounding. Points are
//! shuffled before they are returned, so the planted center is not
//! identifiable by position. Metric instances are built from embedded points
//! whose coordinates are dropped once the distance matrix exists; their
//! planted center is one of the points.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::general::gap_shell_factor;
use crate::oracle::MatrixOracle;
use crate::points::{Center, WeightedPointSet};
use crate::space::{LpNorm, NormedSpace};

const INTERIOR: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceModel {
    Lp,
    Normed,
    Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PlantMode {
    /// One ball of inliers, outliers scattered around it.
    Single,
    /// Two disjoint balls of 40% each plus 20% noise, planted with `alpha = 0.4`.
    TwoClusters,
    /// One ball `B` whose weight exceeds that of the shell
    /// `B^((2C+3) r) \ B` by at least `alpha w`, `C = 2 + 2/alpha`.
    Gap,
}

/// Generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub space: SpaceModel,
    pub mode: PlantMode,
    pub n: usize,
    pub d: usize,
    pub p: f64,
    pub alpha: f64,
    pub r: f64,
    /// Outliers sit at distance at least `(1 + separation) r` from the
    /// planted center (for the gap mode, beyond the shell).
    pub separation: f64,
    /// Random weights in `[0.5, 2)` instead of unit weights (single mode only).
    pub weighted: bool,
    pub seed: u64,
}

impl PlantSpec {
    pub fn new(space: SpaceModel, n: usize, d: usize, alpha: f64, r: f64, seed: u64) -> Self {
        Self { space, mode: PlantMode::Single, n, d, p: 2.0, alpha, r, separation: 2.0, weighted: false, seed }
    }

    pub fn mode(mut self, mode: PlantMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn separation(mut self, s: f64) -> Self {
        self.separation = s;
        self
    }

    pub fn weighted(mut self, yes: bool) -> Self {
        self.weighted = yes;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub space: SpaceModel,
    pub mode: PlantMode,
    pub p: f64,
    pub weights: Vec<f64>,
    /// Coordinates, absent for metric instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// Full distance matrix, present only for metric instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
    pub center: Center,
    pub radius: f64,
    /// Weight inside the planted ball, recomputed after generation.
    pub inlier_weight: f64,
    pub alpha: f64,
    /// The second planted center in two-cluster mode.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub other_centers: Vec<Center>,
    /// Weight of the shell in gap mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell_weight: Option<f64>,
    pub seed: u64,
}

impl PlantedInstance {
    pub fn norm(&self) -> Result<LpNorm> {
        LpNorm::new(self.p)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point_set(&self) -> Result<WeightedPointSet<Vec<f64>>> {
        match &self.points {
            Some(p) => WeightedPointSet::new(p.clone(), self.weights.clone()),
            None => invalid("this instance has no coordinates"),
        }
    }

    pub fn index_set(&self) -> Result<WeightedPointSet<usize>> {
        WeightedPointSet::indexed(self.weights.clone())
    }

    pub fn matrix_oracle(&self) -> Result<MatrixOracle> {
        match (&self.distances, &self.points) {
            (Some(rows), _) => MatrixOracle::from_rows(rows.clone()),
            (None, Some(pts)) => MatrixOracle::from_points(pts, &self.norm()?),
            (None, None) => invalid("instance has neither coordinates nor distances"),
        }
    }

    /// All planted centers: the main one first.
    pub fn centers(&self) -> Vec<&Center> {
        std::iter::once(&self.center).chain(&self.other_centers).collect()
    }

    /// Weight within `radius` of `center`, recomputed from the stored data.
    pub fn coverage(&self, center: &Center, radius: f64) -> Result<f64> {
        let mut sum = 0.0;
        for j in 0..self.len() {
            if self.distance_to(center, j)? <= radius {
                sum += self.weights[j];
            }
        }
        Ok(sum)
    }

    fn distance_to(&self, center: &Center, j: usize) -> Result<f64> {
        match (center, &self.points, &self.distances) {
            (Center::Index(i), _, Some(rows)) => Ok(rows[*i][j]),
            (Center::Index(i), Some(pts), None) => Ok(self.norm()?.distance(&pts[*i], &pts[j])),
            (Center::Point(x), Some(pts), _) => Ok(self.norm()?.distance(x, &pts[j])),
            _ => invalid("center kind does not match the instance"),
        }
    }
}

/// Samples a point with `|x - q|_p` in `[lo, hi]`.
fn around(rng: &mut ChaCha8Rng, norm: &LpNorm, q: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let d = q.len();
    let dir = loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = norm.norm(&v);
        if len > 1e-3 {
            break v.into_iter().map(|c| c / len).collect::<Vec<_>>();
        }
    };
    let u: f64 = rng.gen();
    let t = if lo == 0.0 { hi * u.powf(1.0 / d as f64) } else { lo + (hi - lo) * u };
    q.iter().zip(&dir).map(|(a, b)| a + t * b).collect()
}

fn check_spec(s: &PlantSpec) -> Result<()> {
    if s.n == 0 || s.d == 0 {
        return invalid("n and d must be positive");
    }
    if !(s.alpha > 0.0 && s.alpha <= 1.0) {
        return invalid(format!("alpha must lie in (0, 1], got {}", s.alpha));
    }
    if !(s.r > 0.0 && s.r.is_finite()) {
        return invalid(format!("r must be positive, got {}", s.r));
    }
    if !(s.separation >= 0.0 && s.separation.is_finite()) {
        return invalid("separation must be a finite nonnegative number");
    }
    LpNorm::new(s.p)?;
    Ok(())
}

/// Deterministic in `spec`. Errors on infeasible parameter combinations.
pub fn generate_planted(spec: &PlantSpec) -> Result<PlantedInstance> {
    check_spec(spec)?;
    let norm = LpNorm::new(spec.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, d, r) = (spec.n, spec.d, spec.r);
    let q: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0) * r).collect();
    let far_lo = (1.0 + spec.separation) * r;
    let far_hi = far_lo + 10.0 * r;

    // (point, weight, cluster tag): tag 0 and 1 are the planted balls
    let mut items: Vec<(Vec<f64>, f64, Option<usize>)> = Vec::with_capacity(n);
    let mut other = None;
    match spec.mode {
        PlantMode::Single => {
            let weights: Vec<f64> = (0..n).map(|_| if spec.weighted { rng.gen_range(0.5..2.0) } else { 1.0 }).collect();
            let total: f64 = weights.iter().sum();
            let mut cum = 0.0;
            for (i, w) in weights.into_iter().enumerate() {
                let inlier = cum < spec.alpha * total;
                cum += w;
                let x = if i == 0 && spec.space == SpaceModel::Metric {
                    q.clone()
                } else if inlier {
                    around(&mut rng, &norm, &q, 0.0, r * INTERIOR)
                } else {
                    around(&mut rng, &norm, &q, far_lo, far_hi)
                };
                items.push((x, w, inlier.then_some(0)));
            }
        }
        PlantMode::TwoClusters => {
            let k = (0.4 * n as f64).ceil() as usize;
            if 2 * k > n {
                return invalid(format!("n = {n} is too small for two clusters of {k}"));
            }
            let q2 = around(&mut rng, &norm, &q, (4.0 + spec.separation) * r, (4.0 + spec.separation) * r);
            for (tag, c) in [&q, &q2].into_iter().enumerate() {
                for i in 0..k {
                    let x = if i == 0 && spec.space == SpaceModel::Metric {
                        c.clone()
                    } else {
                        around(&mut rng, &norm, c, 0.0, r * INTERIOR)
                    };
                    items.push((x, 1.0, Some(tag)));
                }
            }
            let mid: Vec<f64> = q.iter().zip(&q2).map(|(a, b)| (a + b) / 2.0).collect();
            let reach = norm.distance(&q, &q2) / 2.0 + far_lo;
            for _ in 2 * k..n {
                items.push((around(&mut rng, &norm, &mid, reach, reach + 10.0 * r), 1.0, None));
            }
            other = Some(q2);
        }
        PlantMode::Gap => {
            let inner = (spec.alpha * n as f64).ceil() as usize;
            let shell = (n - inner.min(n)) / 4;
            if inner + 2 * shell > n || inner == 0 {
                return invalid("infeasible gap instance");
            }
            let k = inner + shell;
            let outer = gap_shell_factor(spec.alpha) * r;
            for i in 0..n {
                let (x, tag) = if i == 0 && spec.space == SpaceModel::Metric {
                    (q.clone(), Some(0))
                } else if i < k {
                    (around(&mut rng, &norm, &q, 0.0, r * INTERIOR), Some(0))
                } else if i < k + shell {
                    (around(&mut rng, &norm, &q, r * 1.01, outer * INTERIOR), None)
                } else {
                    let lo = outer * (1.0 + 1e-6) + spec.separation * r;
                    (around(&mut rng, &norm, &q, lo, lo + 10.0 * r), None)
                };
                items.push((x, 1.0, tag));
            }
        }
    }
    items.shuffle(&mut rng);

    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = items.iter().map(|(x, w, _)| (x.clone(), *w)).unzip();
    let locate = |c: &[f64]| points.iter().position(|x| x.as_slice() == c);
    let (center, other_centers) = if spec.space == SpaceModel::Metric {
        let c = Center::Index(locate(&q).expect("planted center is a point"));
        let o = other.as_deref().map(|q2| Center::Index(locate(q2).expect("planted center is a point")));
        (c, o.into_iter().collect())
    } else {
        (Center::Point(q.clone()), other.into_iter().map(Center::Point).collect())
    };

    let mut inst = PlantedInstance {
        space: spec.space,
        mode: spec.mode,
        p: spec.p,
        weights,
        points: Some(points),
        distances: None,
        center,
        radius: r,
        inlier_weight: 0.0,
        alpha: if spec.mode == PlantMode::TwoClusters { 0.4 } else { spec.alpha },
        other_centers,
        shell_weight: None,
        seed: spec.seed,
    };
    if spec.space == SpaceModel::Metric {
        let pts = inst.points.take().expect("just set");
        inst.distances = Some(MatrixOracle::from_points(&pts, &norm)?.rows());
    }
    inst.inlier_weight = inst.coverage(&inst.center.clone(), r)?;
    let total = inst.total_weight();
    for c in inst.centers() {
        if inst.coverage(c, r)? < inst.alpha * total {
            return invalid("generated instance misses its planted coverage");
        }
    }
    if spec.mode == PlantMode::Gap {
        let outer = gap_shell_factor(spec.alpha) * r;
        let shell = inst.coverage(&inst.center.clone(), outer)? - inst.inlier_weight;
        if inst.inlier_weight - shell < spec.alpha * total {
            return invalid("generated instance misses the gap condition");
        }
        inst.shell_weight = Some(shell);
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_one_puts_everything_inside() {
        for space in [SpaceModel::Lp, SpaceModel::Metric] {
            let inst = generate_planted(&PlantSpec::new(space, 40, 3, 1.0, 2.0, 1)).unwrap();
            assert_eq!(inst.inlier_weight, 40.0);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = PlantSpec::new(SpaceModel::Lp, 50, 4, 0.6, 1.0, 9).weighted(true);
        assert_eq!(generate_planted(&spec).unwrap(), generate_planted(&spec).unwrap());
        let other = PlantSpec { seed: 10, ..spec };
        assert_ne!(generate_planted(&other).unwrap().weights, generate_planted(&spec).unwrap().weights);
    }

    #[test]
    fn two_cluster_centers_both_valid() {
        for space in [SpaceModel::Normed, SpaceModel::Metric] {
            let spec = PlantSpec::new(space, 100, 3, 0.4, 1.0, 3).mode(PlantMode::TwoClusters);
            let inst = generate_planted(&spec).unwrap();
            assert_eq!(inst.other_centers.len(), 1);
            for c in inst.centers() {
                assert!(inst.coverage(c, 1.0).unwrap() >= 40.0);
            }
        }
    }

    #[test]
    fn gap_mode_records_shell() {
        let spec = PlantSpec::new(SpaceModel::Normed, 200, 2, 0.3, 1.0, 4).mode(PlantMode::Gap);
        let inst = generate_planted(&spec).unwrap();
        let shell = inst.shell_weight.unwrap();
        assert!(shell > 0.0);
        assert!(inst.inlier_weight - shell >= 0.3 * 200.0);
    }

    #[test]
    fn metric_instances_have_no_coordinates() {
        let inst = generate_planted(&PlantSpec::new(SpaceModel::Metric, 30, 2, 0.7, 1.0, 5)).unwrap();
        assert!(inst.points.is_none());
        assert!(inst.matrix_oracle().is_ok());
        assert!(matches!(inst.center, Center::Index(_)));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_planted(&PlantSpec::new(SpaceModel::Lp, 0, 2, 0.7, 1.0, 1)).is_err());
        assert!(generate_planted(&PlantSpec::new(SpaceModel::Lp, 5, 2, 0.0, 1.0, 1)).is_err());
        assert!(generate_planted(&PlantSpec::new(SpaceModel::Lp, 5, 2, 0.7, -1.0, 1)).is_err());
        assert!(generate_planted(&PlantSpec::new(SpaceModel::Lp, 5, 2, 0.7, 1.0, 1).separation(-1.0)).is_err());
        let tiny = PlantSpec::new(SpaceModel::Lp, 1, 2, 0.4, 1.0, 1).mode(PlantMode::TwoClusters);
        assert!(generate_planted(&tiny).is_err());
    }

    #[test]
    fn json_round_trip() {
        let inst = generate_planted(&PlantSpec::new(SpaceModel::Lp, 20, 3, 0.75, 0.5, 11)).unwrap();
        let s = serde_json::to_string(&inst).unwrap();
        let back: PlantedInstance = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inst);
    }
}
