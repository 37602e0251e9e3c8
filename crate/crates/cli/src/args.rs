use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::io::InputFormat;

#[derive(Debug, Parser)]
#[command(name = "robust-center", version, about = "1-center clustering with outliers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find one ball holding `alpha` of the weight.
    Solve(SolveArgs),
    /// Check a ball against a data set.
    Verify(VerifyArgs),
    /// List balls one of which meets every dense radius-r ball.
    Cover(CoverArgs),
    /// Measure oracle queries of a metric solver over a grid of sizes.
    Bench(BenchArgs),
    /// Generate a planted instance.
    Gen(GenArgs),
    /// Coordinate-median failure under the operator norm.
    OpnormDemo(OpnormArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Lp,
    Normed,
    Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    CoordinateMedian,
    Halfplus,
    AnyAlpha,
    Logtower,
    MetricHalfplus,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverSolver {
    BelowHalf,
    AnyAlpha,
    MetricCover,
    MetricQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchSolver {
    MetricHalfplus,
    MetricCover,
    MetricQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenMode {
    Single,
    TwoClusters,
    Gap,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to the file extension: .csv, .json (instance), else matrix.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long, value_enum, default_value = "lp")]
    pub space: Space,
    /// Exponent of the l_p norm on coordinates (`inf` for the max norm).
    /// Instance files carry their own.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Read each point as a row-major k x k matrix under the operator norm.
    #[arg(long, value_name = "K")]
    pub matrix_side: Option<usize>,
    /// Relative tolerance of iterative operator-norm evaluation.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub solver: Option<Solver>,
    #[arg(long)]
    pub alpha: f64,
    /// Ball radius; required by the normed solvers, rejected by metric ones.
    #[arg(long)]
    pub r: Option<f64>,
    /// Recursion depth C of the metric solvers.
    #[arg(long, short = 'C', default_value_t = 2)]
    pub levels: u32,
    /// Number of bucket reductions in the logtower solver.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Double r from a seed guess until the result verifies. Not part of
    /// the underlying algorithms.
    #[arg(long)]
    pub radius_search: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CoverArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub solver: CoverSolver,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, short = 'C', default_value_t = 2)]
    pub levels: u32,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// JSON with `center` and `radius` (a solve result works). Without it
    /// the planted ball of an instance file is checked.
    #[arg(long)]
    pub ball: Option<PathBuf>,
    /// Defaults to the instance's alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "metric-halfplus")]
    pub solver: BenchSolver,
    #[arg(long, short = 'C', default_value_t = 2)]
    pub levels: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [64, 256, 1024, 4096])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the randomized pick-and-verify comparison column.
    #[arg(long)]
    pub no_baseline: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "lp")]
    pub space: Space,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: GenMode,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 2.0)]
    pub separation: f64,
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `instance` (default), `csv` points or `matrix`.
    #[arg(long, value_enum, default_value = "instance")]
    pub format: InputFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OpnormArgs {
    #[arg(long)]
    pub k: usize,
    /// Sample this many members instead of enumerating (required for k > 4).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
