//! Deterministic 1-center clustering with outliers.
//!
//! Given weighted points and a fraction `alpha` such that some ball of radius
//! `r` holds `alpha` of the total weight, the solvers here return a ball of
//! radius `O(r)` holding the same weight, or a short list of balls one of
//! which meets every such ball.
//!
//! * [`lp`]: coordinate-wise median for `l_p` spaces, `alpha > 1/2`.
//! * [`halfplus`]: pair reduction and centroid refinement for any normed
//!   space, `alpha > 1/2`.
//! * [`general`]: ball covers, the gap reduction, any-`alpha` scaling and the
//!   bucket tower for normed spaces.
//! * [`metric`]: distance-oracle solvers with unknown `r`.
//! * [`verify`]: brute force, verification, planted instances and the
//!   randomized baseline.
//! * [`opnorm`]: the operator-norm space where the coordinate median fails.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod general;
pub mod halfplus;
pub mod lp;
pub mod metric;
pub mod opnorm;
pub mod oracle;
pub mod planted;
pub mod points;
pub mod select;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
pub use general::{
    ball_cover, below_half_cover, bucket_reduce, cluster_any_alpha, cluster_logtower, AnyAlpha, BucketReduce,
    BucketSize, CoverResult, FractionSolver, HalfPlus, LogTowerResult,
};
pub use halfplus::{centroid_refine, cluster_halfplus, pair_reduce};
pub use lp::{lp_coordinate_median, LpSpace};
pub use metric::{metric_cover, metric_halfplus, metric_quadratic, MetricCover};
pub use opnorm::{median_counterexample_report, operator_norm, OperatorNorm, SignMatrixEnsemble};
pub use oracle::{CountingOracle, DistanceOracle, MatrixOracle, MemoOracle, PointOracle};
pub use planted::{generate_planted, PlantMode, PlantSpec, PlantedInstance, SpaceModel};
pub use points::{CandidateBall, Center, WeightedPointSet};
pub use select::{weighted_median, weighted_quantile_radius};
pub use space::{LpNorm, NormedSpace};
pub use verify::{brute_force_best, las_vegas_baseline, verify_ball, MetricGeometry, NormedGeometry};
