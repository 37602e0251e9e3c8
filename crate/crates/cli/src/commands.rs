use std::path::PathBuf;
use std::time::Instant;

use robust_center::general::{any_alpha_constant, logtower_stack};
use robust_center::lp::coordinate_median_constant;
use robust_center::opnorm::{
    median_counterexample_report, Enumeration, MedianReport, OperatorNorm, SignMatrixEnsemble,
};
use robust_center::verify::{brute_force_best, verify_ball, MetricGeometry, NormedGeometry};
use robust_center::{
    ball_cover, below_half_cover, cluster_any_alpha, cluster_halfplus, cluster_logtower, generate_planted,
    lp_coordinate_median, metric_cover, metric_halfplus, metric_quadratic, weighted_quantile_radius, AnyAlpha,
    BucketSize, CandidateBall, Center, DistanceOracle, FractionSolver, LpNorm, LpSpace, NormedSpace, PlantMode,
    PlantSpec, PlantedInstance, PointOracle, SpaceModel, WeightedPointSet,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{
    Cli, Command, CoverArgs, CoverSolver, DataArgs, GenArgs, GenMode, OpnormArgs, SolveArgs, Solver, Space, VerifyArgs,
};
use crate::error::{CliError, CliResult, EXIT_NO_SOLUTION, EXIT_OK};
use crate::io::{self, Dataset, InputFormat};

pub const SCHEMA_VERSION: u32 = 1;

/// Most doublings the radius search tries before giving up.
pub const MAX_DOUBLINGS: u32 = 200;

/// Text for standard output (or `output`) and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Solve(a) => solve(&a),
        Command::Verify(a) => verify(&a),
        Command::Cover(a) => cover(&a),
        Command::Bench(a) => crate::bench::bench(&a),
        Command::Gen(a) => gen(&a),
        Command::OpnormDemo(a) => opnorm_demo(&a),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NoSolution,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::NoSolution
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::NoSolution => EXIT_NO_SOLUTION,
        }
    }
}

// ---------------------------------------------------------------------------
// data

#[derive(Debug, Clone, Copy)]
pub enum AnyNorm {
    Lp(LpNorm),
    Operator(OperatorNorm),
}

impl NormedSpace for AnyNorm {
    fn norm(&self, x: &[f64]) -> f64 {
        match self {
            AnyNorm::Lp(n) => n.norm(x),
            AnyNorm::Operator(n) => n.norm(x),
        }
    }
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            AnyNorm::Lp(n) => n.distance(a, b),
            AnyNorm::Operator(n) => n.distance(a, b),
        }
    }
}

pub enum Loaded {
    Coords { ps: WeightedPointSet<Vec<f64>>, norm: AnyNorm },
    Metric { ps: WeightedPointSet<usize>, oracle: Box<dyn DistanceOracle> },
}

impl Loaded {
    fn total_weight(&self) -> f64 {
        match self {
            Loaded::Coords { ps, .. } => ps.total_weight(),
            Loaded::Metric { ps, .. } => ps.total_weight(),
        }
    }
}

fn make_norm(data: &DataArgs, instance_p: Option<f64>) -> CliResult<AnyNorm> {
    Ok(match data.matrix_side {
        Some(k) => AnyNorm::Operator(OperatorNorm::new(k, data.tol)?),
        None => AnyNorm::Lp(LpNorm::new(instance_p.unwrap_or(data.p))?),
    })
}

/// Effective space: metric instance files are always metric.
fn effective_space(data: &DataArgs, set: &Dataset) -> Space {
    match set {
        Dataset::Instance(i) if i.space == SpaceModel::Metric => Space::Metric,
        _ => data.space,
    }
}

pub fn load_data(data: &DataArgs) -> CliResult<(Loaded, Space)> {
    let set = io::load(&data.input, data.format)?;
    let space = effective_space(data, &set);
    let instance_p = match &set {
        Dataset::Instance(i) => Some(i.p),
        _ => None,
    };
    let norm = make_norm(data, instance_p)?;
    let loaded = match (space, set) {
        (Space::Metric, Dataset::Matrix(o)) => {
            Loaded::Metric { ps: WeightedPointSet::indexed(vec![1.0; o.size()])?, oracle: Box::new(o) }
        }
        (Space::Metric, Dataset::Points(ps)) => {
            let ix = WeightedPointSet::indexed(ps.weights().to_vec())?;
            Loaded::Metric { ps: ix, oracle: Box::new(PointOracle::new(ps.points().to_vec(), norm)) }
        }
        (Space::Metric, Dataset::Instance(inst)) => {
            Loaded::Metric { ps: inst.index_set()?, oracle: Box::new(inst.matrix_oracle()?) }
        }
        (_, Dataset::Points(ps)) => Loaded::Coords { ps, norm },
        (_, Dataset::Instance(inst)) if inst.points.is_some() => Loaded::Coords { ps: inst.point_set()?, norm },
        _ => return Err(CliError::usage("this space needs coordinates; distance data only supports --space metric")),
    };
    if let (Loaded::Coords { ps, .. }, Some(k)) = (&loaded, data.matrix_side) {
        if ps.dimension()? != k * k {
            return Err(CliError::usage(format!("--matrix-side {k} needs {} coordinates per point", k * k)));
        }
    }
    Ok((loaded, space))
}

// ---------------------------------------------------------------------------
// solve

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSearch {
    pub start: f64,
    pub rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema_version: u32,
    pub command: String,
    pub solver: String,
    pub space: String,
    pub status: Status,
    pub center: Option<Center>,
    pub radius: Option<f64>,
    pub covered_weight: Option<f64>,
    pub total_weight: f64,
    pub fraction: f64,
    pub fraction_achieved: Option<f64>,
    pub approx_constant: Option<f64>,
    pub r: Option<f64>,
    pub query_count: Option<u64>,
    pub radius_search: Option<RadiusSearch>,
    pub details: Map<String, Value>,
    pub wall_time_ms: f64,
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn default_solver(space: Space, alpha: f64) -> Solver {
    match space {
        Space::Lp => Solver::CoordinateMedian,
        Space::Normed if alpha > 0.5 => Solver::Halfplus,
        Space::Normed => Solver::AnyAlpha,
        Space::Metric => Solver::MetricHalfplus,
    }
}

fn uses_r(solver: Solver) -> bool {
    matches!(solver, Solver::Halfplus | Solver::AnyAlpha | Solver::Logtower)
}

/// Rejects bad flag combinations.
pub fn validate_solve(a: &SolveArgs, solver: Solver) -> CliResult<()> {
    let alpha = a.alpha;
    let usage = |m: String| Err(CliError::Usage(m));
    if !(alpha > 0.0 && alpha <= 1.0) {
        return usage(format!("--alpha must lie in (0, 1], got {alpha}"));
    }
    if let Some(r) = a.r {
        if !(r > 0.0 && r.is_finite()) {
            return usage(format!("--r must be positive, got {r}"));
        }
    }
    let space = a.data.space;
    let name = label(&solver);
    match solver {
        Solver::CoordinateMedian if space != Space::Lp || a.data.matrix_side.is_some() => {
            return usage("coordinate-median needs --space lp".into())
        }
        Solver::Halfplus | Solver::AnyAlpha | Solver::Logtower if space == Space::Metric => {
            return usage(format!("{name} needs coordinates (--space lp or normed)"))
        }
        Solver::MetricHalfplus if space != Space::Metric => {
            return usage("metric-halfplus needs --space metric".into())
        }
        _ => {}
    }
    let needs_half = matches!(solver, Solver::CoordinateMedian | Solver::Halfplus | Solver::MetricHalfplus);
    if needs_half && alpha <= 0.5 {
        return usage(format!("{name} needs alpha > 1/2, got {alpha}"));
    }
    if matches!(solver, Solver::AnyAlpha | Solver::Logtower) && alpha >= 1.0 {
        return usage(format!("{name} needs alpha < 1"));
    }
    if solver == Solver::Logtower {
        if a.k > 4 {
            return usage(format!("--k {} is too deep; use at most 4", a.k));
        }
        if !logtower_stack::<LpNorm>(a.k, BucketSize::PolyLog(2)).accepts(alpha) {
            return usage(format!("logtower with k = {} does not accept alpha {alpha}", a.k));
        }
    }
    if space == Space::Metric && a.r.is_some() {
        return usage("metric solvers take no r".into());
    }
    if solver == Solver::BruteForce && a.r.is_some() {
        return usage("brute-force takes no r".into());
    }
    if uses_r(solver) && a.r.is_none() && !a.radius_search {
        return usage(format!("{name} needs --r (or --radius-search)"));
    }
    if a.radius_search && !uses_r(solver) {
        return usage(format!("--radius-search only applies to solvers that take r, not {name}"));
    }
    if solver == Solver::MetricHalfplus && a.levels == 0 {
        return usage("--levels must be at least 1".into());
    }
    Ok(())
}

struct Attempt {
    ball: Option<CandidateBall>,
    constant: Option<f64>,
    details: Map<String, Value>,
}

fn normed_attempt(
    solver: Solver,
    ps: &WeightedPointSet<Vec<f64>>,
    norm: &AnyNorm,
    alpha: f64,
    r: f64,
    k: u32,
) -> CliResult<Attempt> {
    let mut details = Map::new();
    let (ball, constant) = match solver {
        Solver::Halfplus => {
            let ball = cluster_halfplus(ps, norm, alpha, r)?;
            let c = ball.radius / r;
            (Some(ball), Some(c))
        }
        Solver::AnyAlpha => {
            let found = cluster_any_alpha(ps, norm, alpha, r)?;
            if let Some(s) = &found {
                details.insert("scale".into(), s.scale.into());
            }
            (found.map(|s| s.ball), Some(any_alpha_constant(alpha)))
        }
        Solver::Logtower => {
            let found = cluster_logtower(ps, norm, alpha, k, r)?;
            details.insert("depth".into(), k.into());
            let c = logtower_stack::<AnyNorm>(k, BucketSize::PolyLog(2)).constant(alpha);
            if let Some(t) = &found {
                details.insert("base_fraction".into(), t.base_fraction.into());
            }
            (found.map(|t| t.ball), Some(c))
        }
        _ => unreachable!("not an r-based solver"),
    };
    Ok(Attempt { ball, constant, details })
}

/// Smallest positive distance from point 0, the default radius-search seed.
fn seed_guess(ps: &WeightedPointSet<Vec<f64>>, norm: &AnyNorm) -> f64 {
    let x = ps.point(0);
    let d = ps.points().iter().map(|y| norm.distance(x, y)).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    if d.is_finite() {
        d
    } else {
        1.0
    }
}

pub fn solve(a: &SolveArgs) -> CliResult<Outcome> {
    let (loaded, space) = load_data(&a.data)?;
    if space == Space::Metric
        && a.data.space != Space::Metric
        && a.solver.is_some_and(|s| uses_r(s) || s == Solver::CoordinateMedian)
    {
        return Err(CliError::usage("this solver needs coordinates, but the input is a metric instance"));
    }
    // metric instance files pick the metric space whatever --space says
    let a = &SolveArgs { data: DataArgs { space, ..a.data.clone() }, ..a.clone() };
    let solver = a.solver.unwrap_or_else(|| default_solver(space, a.alpha));
    validate_solve(a, solver)?;
    let start = Instant::now();
    let total = loaded.total_weight();
    let alpha = a.alpha;
    let mut report = SolveReport {
        schema_version: SCHEMA_VERSION,
        command: "solve".into(),
        solver: label(&solver),
        space: label(&space),
        status: Status::NoSolution,
        center: None,
        radius: None,
        covered_weight: None,
        total_weight: total,
        fraction: alpha,
        fraction_achieved: None,
        approx_constant: None,
        r: a.r,
        query_count: None,
        radius_search: None,
        details: Map::new(),
        wall_time_ms: 0.0,
    };

    let mut ball = None;
    let mut verified = false;
    match (&loaded, solver) {
        (Loaded::Coords { ps, norm }, Solver::CoordinateMedian) => {
            let AnyNorm::Lp(lp) = norm else { return Err(CliError::usage("coordinate-median needs an l_p norm")) };
            let x = lp_coordinate_median(ps, &LpSpace { norm: *lp, dim: ps.dimension()? }, alpha)?;
            let radius = match a.r {
                Some(r) => {
                    let c = coordinate_median_constant(alpha, lp.p());
                    report.approx_constant = Some(c);
                    c * r
                }
                None => {
                    let d: Vec<f64> = ps.points().iter().map(|y| lp.distance(&x, y)).collect();
                    weighted_quantile_radius(&d, ps.weights(), alpha)?
                }
            };
            ball = Some(CandidateBall { center: Center::Point(x), radius, covered_weight: 0.0 });
        }
        (Loaded::Coords { ps, norm }, s) if uses_r(s) => {
            let g = NormedGeometry::new(ps, norm);
            let mut r = match a.r {
                Some(r) => r,
                None => seed_guess(ps, norm),
            };
            let rounds = if a.radius_search { MAX_DOUBLINGS } else { 0 };
            let first = r;
            for round in 0..=rounds {
                let attempt = normed_attempt(s, ps, norm, alpha, r, a.k)?;
                report.approx_constant = attempt.constant;
                report.details = attempt.details;
                report.r = Some(r);
                if a.radius_search {
                    report.radius_search = Some(RadiusSearch { start: first, rounds: round });
                }
                if let Some(b) = attempt.ball {
                    let v = verify_ball(&g, &b, alpha)?;
                    let ok = v.ok;
                    ball = Some(b);
                    if ok {
                        break;
                    }
                }
                r *= 2.0;
            }
        }
        (Loaded::Coords { ps, norm }, Solver::BruteForce) => {
            ball = Some(brute_force_best(&NormedGeometry::new(ps, norm), alpha)?);
            report.approx_constant = Some(2.0);
        }
        (Loaded::Metric { ps, oracle }, Solver::MetricHalfplus) => {
            ball = Some(metric_halfplus(ps, oracle.as_ref(), alpha, a.levels)?);
            report.query_count = Some(oracle.query_count());
            report.approx_constant = Some(2.0 * a.levels as f64);
            report.details.insert("levels".into(), a.levels.into());
        }
        (Loaded::Metric { ps, oracle }, Solver::BruteForce) => {
            ball = Some(brute_force_best(&MetricGeometry::new(ps, oracle.as_ref()), alpha)?);
            report.query_count = Some(oracle.query_count());
            report.approx_constant = Some(2.0);
        }
        _ => return Err(CliError::usage(format!("{} does not apply to this input", label(&solver)))),
    }

    if let Some(b) = ball {
        let v = match &loaded {
            Loaded::Coords { ps, norm } => verify_ball(&NormedGeometry::new(ps, norm), &b, alpha)?,
            Loaded::Metric { ps, oracle } => verify_ball(&MetricGeometry::new(ps, oracle.as_ref()), &b, alpha)?,
        };
        verified = v.ok;
        report.covered_weight = Some(v.covered_weight);
        report.fraction_achieved = Some(v.covered_weight / total);
        report.center = Some(b.center);
        report.radius = Some(b.radius);
    }
    report.status = Status::of(verified);
    report.wall_time_ms = elapsed_ms(start);
    Ok(Outcome { text: to_json(&report)?, code: report.status.code(), output: a.output.clone() })
}

// ---------------------------------------------------------------------------
// cover

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub schema_version: u32,
    pub command: String,
    pub solver: String,
    pub space: String,
    pub status: Status,
    pub balls: Vec<CandidateBall>,
    pub max_balls: usize,
    pub total_weight: f64,
    pub fraction: f64,
    pub approx_constant: f64,
    pub guarantee: Option<bool>,
    pub r: Option<f64>,
    pub query_count: Option<u64>,
    pub wall_time_ms: f64,
}

pub fn validate_cover(a: &CoverArgs) -> CliResult<()> {
    let alpha = a.alpha;
    let metric = matches!(a.solver, CoverSolver::MetricCover | CoverSolver::MetricQuadratic);
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CliError::usage(format!("--alpha must lie in (0, 1], got {alpha}")));
    }
    if metric != (a.data.space == Space::Metric) {
        return Err(CliError::usage(format!(
            "{} needs --space {}",
            label(&a.solver),
            if metric { "metric" } else { "lp or normed" }
        )));
    }
    if metric && a.r.is_some() {
        return Err(CliError::usage("metric solvers take no r"));
    }
    if !metric && alpha >= 1.0 {
        return Err(CliError::usage(format!("{} needs alpha < 1", label(&a.solver))));
    }
    match a.r {
        None if !metric => Err(CliError::usage(format!("{} needs --r", label(&a.solver)))),
        Some(r) if !(r > 0.0 && r.is_finite()) => Err(CliError::usage(format!("--r must be positive, got {r}"))),
        _ if a.solver == CoverSolver::MetricCover && a.levels == 0 => {
            Err(CliError::usage("--levels must be at least 1"))
        }
        _ => Ok(()),
    }
}

pub fn cover(a: &CoverArgs) -> CliResult<Outcome> {
    let (loaded, space) = load_data(&a.data)?;
    let a = &CoverArgs { data: DataArgs { space, ..a.data.clone() }, ..a.clone() };
    validate_cover(a)?;
    let start = Instant::now();
    let alpha = a.alpha;
    let (balls, approx_constant, guarantee, query_count) = match (&loaded, a.solver) {
        (Loaded::Coords { ps, norm }, CoverSolver::BelowHalf) => {
            let c = below_half_cover(ps, norm, alpha, a.r.expect("validated"))?;
            (c.balls, c.approx_constant, Some(c.guarantee), None)
        }
        (Loaded::Coords { ps, norm }, CoverSolver::AnyAlpha) => {
            let k = any_alpha_constant(alpha);
            let c = ball_cover(&AnyAlpha, norm, ps, alpha, alpha, k, a.r.expect("validated"))?;
            (c.balls, c.approx_constant, Some(c.guarantee), None)
        }
        (Loaded::Metric { ps, oracle }, CoverSolver::MetricCover) => {
            let c = metric_cover(ps, oracle.as_ref(), alpha, a.levels)?;
            (c.balls, c.approx_constant, None, Some(oracle.query_count()))
        }
        (Loaded::Metric { ps, oracle }, CoverSolver::MetricQuadratic) => {
            let c = metric_quadratic(ps, oracle.as_ref(), alpha)?;
            (c.balls, c.approx_constant, None, Some(oracle.query_count()))
        }
        _ => return Err(CliError::usage(format!("{} does not apply to this input", label(&a.solver)))),
    };
    let mut all_ok = !balls.is_empty();
    for b in &balls {
        let v = match &loaded {
            Loaded::Coords { ps, norm } => verify_ball(&NormedGeometry::new(ps, norm), b, alpha)?,
            Loaded::Metric { ps, oracle } => verify_ball(&MetricGeometry::new(ps, oracle.as_ref()), b, alpha)?,
        };
        all_ok &= v.ok;
    }
    let report = CoverReport {
        schema_version: SCHEMA_VERSION,
        command: "cover".into(),
        solver: label(&a.solver),
        space: label(&space),
        status: Status::of(all_ok),
        max_balls: (1.0 / alpha + 1e-12).floor() as usize,
        balls,
        total_weight: loaded.total_weight(),
        fraction: alpha,
        approx_constant,
        guarantee,
        r: a.r,
        query_count,
        wall_time_ms: elapsed_ms(start),
    };
    Ok(Outcome { text: to_json(&report)?, code: report.status.code(), output: a.output.clone() })
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Clone, Deserialize)]
struct BallSpec {
    center: Option<Center>,
    radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: String,
    pub ok: bool,
    pub center: Center,
    pub radius: f64,
    pub covered_weight: f64,
    pub total_weight: f64,
    pub alpha: f64,
}

pub fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let set = io::load(&a.data.input, a.data.format)?;
    let planted = match &set {
        Dataset::Instance(i) => Some((**i).clone()),
        _ => None,
    };
    let (center, radius) = match (&a.ball, &planted) {
        (Some(path), _) => {
            let text = io::read_text(path)?;
            let spec: BallSpec = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                path: path.display().to_string(),
                line: e.line() as u64,
                msg: e.to_string(),
            })?;
            match (spec.center, spec.radius) {
                (Some(c), Some(r)) => (c, r),
                _ => return Err(CliError::usage("ball file has no center or radius")),
            }
        }
        (None, Some(inst)) => (inst.center.clone(), inst.radius),
        (None, None) => return Err(CliError::usage("--ball is required unless the input is an instance file")),
    };
    let alpha = match (a.alpha, &planted) {
        (Some(x), _) => x,
        (None, Some(inst)) => inst.alpha,
        (None, None) => return Err(CliError::usage("--alpha is required unless the input is an instance file")),
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(CliError::usage(format!("--alpha must lie in (0, 1], got {alpha}")));
    }
    let (loaded, _) = load_data(&a.data)?;
    let ball = CandidateBall { center: center.clone(), radius, covered_weight: 0.0 };
    let v = match &loaded {
        Loaded::Coords { ps, norm } => verify_ball(&NormedGeometry::new(ps, norm), &ball, alpha)?,
        Loaded::Metric { ps, oracle } => verify_ball(&MetricGeometry::new(ps, oracle.as_ref()), &ball, alpha)?,
    };
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify".into(),
        ok: v.ok,
        center,
        radius,
        covered_weight: v.covered_weight,
        total_weight: loaded.total_weight(),
        alpha,
    };
    Ok(Outcome { text: to_json(&report)?, code: Status::of(v.ok).code(), output: a.output.clone() })
}

// ---------------------------------------------------------------------------
// gen

pub fn plant_spec(a: &GenArgs) -> PlantSpec {
    let space = match a.space {
        Space::Lp => SpaceModel::Lp,
        Space::Normed => SpaceModel::Normed,
        Space::Metric => SpaceModel::Metric,
    };
    let mode = match a.mode {
        GenMode::Single => PlantMode::Single,
        GenMode::TwoClusters => PlantMode::TwoClusters,
        GenMode::Gap => PlantMode::Gap,
    };
    PlantSpec::new(space, a.n, a.d, a.alpha, a.r, a.seed)
        .mode(mode)
        .p(a.p)
        .separation(a.separation)
        .weighted(a.weighted)
}

pub fn render_instance(inst: &PlantedInstance, format: InputFormat) -> CliResult<String> {
    match format {
        InputFormat::Instance => io::write_instance(inst),
        InputFormat::Csv => Ok(io::write_points_csv(
            &inst.point_set().map_err(|_| CliError::usage("metric instances have no coordinates to write as csv"))?,
        )),
        InputFormat::Matrix => Ok(io::write_matrix(&inst.matrix_oracle()?)),
    }
}

pub fn gen(a: &GenArgs) -> CliResult<Outcome> {
    let inst = generate_planted(&plant_spec(a)).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Outcome { text: render_instance(&inst, a.format)?, code: EXIT_OK, output: a.output.clone() })
}

// ---------------------------------------------------------------------------
// opnorm-demo

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpnormDemoReport {
    pub schema_version: u32,
    pub command: String,
    pub report: MedianReport,
    pub wall_time_ms: f64,
}

pub fn opnorm_demo(a: &OpnormArgs) -> CliResult<Outcome> {
    let enumeration = match a.samples {
        Some(count) => Enumeration::Sampled { count, seed: a.seed },
        None => Enumeration::Exhaustive,
    };
    let ensemble = SignMatrixEnsemble::new(a.k, enumeration).map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let report = median_counterexample_report(&ensemble, a.tol)?;
    let out = OpnormDemoReport {
        schema_version: SCHEMA_VERSION,
        command: "opnorm-demo".into(),
        report,
        wall_time_ms: elapsed_ms(start),
    };
    Ok(Outcome { text: to_json(&out)?, code: EXIT_OK, output: a.output.clone() })
}
