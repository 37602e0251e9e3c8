//! Oracle-query scaling of the metric solvers on planted instances.

use std::time::Instant;

use robust_center::verify::{las_vegas_baseline, MetricGeometry, DEFAULT_ATTEMPT_CAP};
use robust_center::{
    generate_planted, metric_cover, metric_halfplus, metric_quadratic, DistanceOracle, LpNorm, PlantSpec, PointOracle,
    SpaceModel, WeightedPointSet,
};
use serde::{Deserialize, Serialize};

use crate::args::{BenchArgs, BenchSolver};
use crate::commands::{to_json, Outcome, SCHEMA_VERSION};
use crate::error::{CliError, CliResult, EXIT_NO_SOLUTION, EXIT_OK};

pub const MIN_GRID: usize = 4;

/// Radius of the planted ball in every bench instance.
const PLANTED_R: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub attempts: usize,
    pub queries: u64,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: usize,
    pub queries: u64,
    pub balls: usize,
    /// Largest returned radius.
    pub radius: f64,
    /// Whether every returned radius is within `approx_constant * r`.
    pub within_bound: bool,
    pub baseline: Option<Baseline>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub command: String,
    pub solver: BenchSolver,
    pub levels: u32,
    pub alpha: f64,
    pub d: usize,
    pub seed: u64,
    pub approx_constant: f64,
    pub expected_slope: f64,
    pub slope: f64,
    pub points: Vec<BenchPoint>,
    pub wall_time_ms: f64,
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn validate(a: &BenchArgs) -> CliResult<()> {
    let mut sizes = a.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < MIN_GRID {
        return Err(CliError::usage(format!("the size grid needs at least {MIN_GRID} distinct sizes")));
    }
    if sizes[0] < 2 {
        return Err(CliError::usage("grid sizes must be at least 2"));
    }
    if !(a.alpha > 0.0 && a.alpha <= 1.0) {
        return Err(CliError::usage(format!("--alpha must lie in (0, 1], got {}", a.alpha)));
    }
    if a.solver == BenchSolver::MetricHalfplus && a.alpha <= 0.5 {
        return Err(CliError::usage("metric-halfplus needs alpha > 1/2"));
    }
    if a.levels == 0 || a.d == 0 {
        return Err(CliError::usage("--levels and --d must be positive"));
    }
    Ok(())
}

fn bench_point(a: &BenchArgs, n: usize) -> CliResult<BenchPoint> {
    let spec = PlantSpec::new(SpaceModel::Lp, n, a.d, a.alpha, PLANTED_R, a.seed);
    let inst = generate_planted(&spec)?;
    let points = inst.points.clone().expect("lp instances have coordinates");
    let norm = LpNorm::new(inst.p)?;
    let ps = WeightedPointSet::indexed(inst.weights.clone())?;
    let constant = approx_constant(a);

    let start = Instant::now();
    let oracle = PointOracle::new(points.clone(), norm);
    let balls = match a.solver {
        BenchSolver::MetricHalfplus => vec![metric_halfplus(&ps, &oracle, a.alpha, a.levels)?],
        BenchSolver::MetricCover => metric_cover(&ps, &oracle, a.alpha, a.levels)?.balls,
        BenchSolver::MetricQuadratic => metric_quadratic(&ps, &oracle, a.alpha)?.balls,
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let queries = oracle.query_count();

    let baseline = if a.no_baseline {
        None
    } else {
        let lv_oracle = PointOracle::new(points, norm);
        let out =
            las_vegas_baseline(&MetricGeometry::new(&ps, &lv_oracle), a.alpha, PLANTED_R, a.seed, DEFAULT_ATTEMPT_CAP)?;
        Some(Baseline { attempts: out.attempts, queries: lv_oracle.query_count(), found: out.ball.is_some() })
    };
    let radius = balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    Ok(BenchPoint {
        n,
        queries,
        balls: balls.len(),
        radius,
        within_bound: !balls.is_empty() && balls.iter().all(|b| b.radius <= constant * PLANTED_R + 1e-9),
        baseline,
        wall_time_ms,
    })
}

fn approx_constant(a: &BenchArgs) -> f64 {
    match a.solver {
        BenchSolver::MetricQuadratic => 2.0,
        _ => 2.0 * a.levels as f64,
    }
}

/// Runs every grid size on its own thread; results come back in grid order.
pub fn run_bench(a: &BenchArgs) -> CliResult<BenchReport> {
    validate(a)?;
    let start = Instant::now();
    let points = std::thread::scope(|s| {
        let handles: Vec<_> = a.sizes.iter().map(|&n| s.spawn(move || bench_point(a, n))).collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect::<CliResult<Vec<_>>>()
    })?;
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.queries.max(1) as f64).ln()).collect();
    let slope = least_squares_slope(&xs, &ys).ok_or_else(|| CliError::usage("degenerate size grid"))?;
    let expected_slope = match a.solver {
        BenchSolver::MetricQuadratic => 2.0,
        _ => 1.0 + 1.0 / a.levels as f64,
    };
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        command: "bench".into(),
        solver: a.solver,
        levels: a.levels,
        alpha: a.alpha,
        d: a.d,
        seed: a.seed,
        approx_constant: approx_constant(a),
        expected_slope,
        slope,
        points,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn bench(a: &BenchArgs) -> CliResult<Outcome> {
    let report = run_bench(a)?;
    let code = if report.points.iter().all(|p| p.within_bound) { EXIT_OK } else { EXIT_NO_SOLUTION };
    Ok(Outcome { text: to_json(&report)?, code, output: a.output.clone() })
}
