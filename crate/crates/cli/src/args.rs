use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Stochastic job-shop scheduling with scrap and rework.
///
/// Every option can also be set through an environment variable named
/// `SJS_` followed by the upper-case flag name (`--rho-max` is `SJS_RHO_MAX`).
#[derive(Debug, Parser)]
#[command(name = "jobshop", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random instance and write it as JSON.
    Generate(GenerateArgs),
    /// Run the dual decomposition and write the solution, convergence log and Gantt table.
    Solve(SolveArgs),
    /// Check a solution file against every scheduling rule.
    Validate(ValidateArgs),
    /// Compare the exact expected tardiness of a solution with Monte-Carlo estimates.
    Evaluate(EvaluateArgs),
    /// Run a benchmark suite and write a summary CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// 20 jobs, 5 operations, 5 dedicated groups, U[1,5] processing.
    Example1,
    /// U[1,50] processing, due dates scaled by ten.
    Example2,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "example1", env = "SJS_FAMILY")]
    pub family: Family,
    #[arg(long, env = "SJS_JOBS")]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 1, env = "SJS_SEED")]
    pub seed: u64,
    /// Output file.
    #[arg(long, env = "SJS_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Builtin,
    External,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0.5, env = "SJS_GAMMA")]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.95, env = "SJS_ZETA")]
    pub zeta: f64,
    /// Penalty growth per iteration [default: 5% of the average job weight].
    #[arg(long, env = "SJS_BETA")]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.0, env = "SJS_RHO0")]
    pub rho0: f64,
    /// Penalty ceiling [default: 20 times the average job weight].
    #[arg(long, env = "SJS_RHO_MAX")]
    pub rho_max: Option<f64>,
    /// Residual norm that triggers a feasibility search [default: 1e-3 of the capacity norm].
    #[arg(long, env = "SJS_EPS_VIOLATION")]
    pub eps_violation: Option<f64>,
    /// Initial repair window half-width in time blocks.
    #[arg(long, default_value_t = 2, env = "SJS_DELTA")]
    pub delta: u32,
    /// Largest repair window half-width [default: the shift length].
    #[arg(long, env = "SJS_DELTA_MAX")]
    pub delta_max: Option<u32>,
    #[arg(long, default_value_t = 0.10, env = "SJS_TARGET_GAP")]
    pub target_gap: f64,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 600.0, env = "SJS_TIME_LIMIT")]
    pub time_limit: f64,
    #[arg(long, value_enum, default_value = "builtin", env = "SJS_BACKEND")]
    pub backend: BackendKind,
    /// External MILP command with `{model}` and `{solution}` placeholders.
    #[arg(long, env = "SJS_SOLVER_CMD")]
    pub solver_cmd: Option<String>,
    #[arg(long, default_value_t = 20, env = "SJS_BOUND_EVERY")]
    pub bound_every: usize,
    /// Periodic feasibility search every N iterations (0: residual trigger only).
    #[arg(long, default_value_t = 25, env = "SJS_REPAIR_EVERY")]
    pub repair_every: usize,
    #[arg(long, env = "SJS_MAX_ITERATIONS")]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Recorded in the solution file.
    #[arg(long, env = "SJS_SEED")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".", env = "SJS_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    /// Monte-Carlo samples per mode.
    #[arg(long, default_value_t = 200_000, env = "SJS_SAMPLES")]
    pub samples: usize,
    #[arg(long, default_value_t = 1, env = "SJS_SEED")]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".", env = "SJS_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// The bundled 20-job base case.
    Example1,
    /// Reseeded instances of the base-case family.
    Example1Robustness,
    /// Long processing times, 20 and 100 jobs.
    Example2,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, env = "SJS_SUITE")]
    pub suite: Suite,
    /// Number of reseeded cases.
    #[arg(long, default_value_t = 5, env = "SJS_SEEDS")]
    pub seeds: u64,
    /// Job counts of the long-processing suite.
    #[arg(long, value_delimiter = ',', default_value = "20,100", env = "SJS_JOBS")]
    pub jobs: Vec<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1, env = "SJS_SEED")]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".", env = "SJS_OUT")]
    pub out: PathBuf,
}
