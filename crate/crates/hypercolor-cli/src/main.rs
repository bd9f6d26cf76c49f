//! Command-line harness for the hypercolor library.
//!
//! Every command takes an explicit seed (overridable via HYPERCOLOR_SEED),
//! routes all randomness through named substreams, and emits one JSON record
//! per line of output. Rerunning a command with an identical configuration
//! reproduces its records byte for byte.

mod commands;
mod record;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "hypercolor",
    version,
    about = "Promise-driven hypergraph coloring: generation, relaxation, rounding, cone measures, degree reduction and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted promise instance and its witness coloring.
    Gen(GenArgs),
    /// Solve the unit-vector relaxation of an instance.
    Solve(SolveArgs),
    /// Hyperplane-round a vector solution with best-of-T trials.
    Round(RoundArgs),
    /// Monte Carlo cone measure, analytic upper bound and asymptotic.
    Cone(ConeArgs),
    /// Run one degree-reduction pass and report the partial coloring.
    Reduce(ReduceArgs),
    /// Full min-coloring pipeline, compared against sequential greedy.
    Mincolor(MincolorArgs),
    /// Sweep a (k, l) grid and emit a summary table with resume support.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum PromiseArg {
    /// Two-coloring with bounded edge imbalance.
    Discrepancy,
    /// Every edge sees all chi colors.
    Rainbow,
    /// Every edge's vertices get pairwise distinct colors.
    Strong,
}

impl PromiseArg {
    pub(crate) fn kind(self, param: usize) -> hypercolor::PromiseKind {
        match self {
            PromiseArg::Discrepancy => hypercolor::PromiseKind::Discrepancy(param),
            PromiseArg::Rainbow => hypercolor::PromiseKind::Rainbow(param),
            PromiseArg::Strong => hypercolor::PromiseKind::Strong(param),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum ConeFamily {
    /// Pairwise inner product -1/(k+l-1) from a strong coloring.
    Strong,
    /// Equicorrelated cone with prescribed sum-norm l.
    Symmetric,
    /// Gram matrix read from a file.
    Gram,
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum ReduceAlg {
    /// Strong-promise batch reduction.
    Sc,
    /// Low-discrepancy reduction (odd arity).
    Ld,
    /// Rainbow reduction.
    Rc,
}

#[derive(Args)]
pub(crate) struct GenArgs {
    #[arg(long, value_enum)]
    pub promise: PromiseArg,
    /// Discrepancy bound l, or palette size chi.
    #[arg(long)]
    pub param: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the instance.
    #[arg(long)]
    pub instance_out: String,
    /// Where to write the witness coloring.
    #[arg(long)]
    pub witness_out: Option<String>,
    /// Record sink: a path, or - for stdout.
    #[arg(long, default_value = "-")]
    pub records: String,
}

#[derive(Args)]
pub(crate) struct SolveArgs {
    #[arg(long)]
    pub instance: String,
    #[arg(long, value_enum)]
    pub promise: PromiseArg,
    #[arg(long)]
    pub param: usize,
    /// Embedding dimension; defaults to the solver's choice.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the vector solution.
    #[arg(long)]
    pub vectors_out: Option<String>,
    #[arg(long, default_value = "-")]
    pub records: String,
}

#[derive(Args)]
pub(crate) struct RoundArgs {
    #[arg(long)]
    pub instance: String,
    #[arg(long)]
    pub vectors: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Threshold passed through to the rounding parameters.
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the best coloring found.
    #[arg(long)]
    pub coloring_out: Option<String>,
    #[arg(long, default_value = "-")]
    pub records: String,
}

#[derive(Args)]
pub(crate) struct ConeArgs {
    #[arg(long, value_enum)]
    pub family: ConeFamily,
    /// Cone dimension (strong and symmetric families).
    #[arg(long)]
    pub k: Option<usize>,
    /// Family parameter: integer l for strong, sum-norm for symmetric.
    #[arg(long)]
    pub l: Option<f64>,
    /// Gram matrix file (gram family).
    #[arg(long)]
    pub gram: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "-")]
    pub records: String,
}

#[derive(Args)]
pub(crate) struct ReduceArgs {
    #[arg(long)]
    pub instance: String,
    #[arg(long, value_enum)]
    pub alg: ReduceAlg,
    /// Ld only: stop at the warmup pass.
    #[arg(long, default_value_t = false)]
    pub warmup: bool,
    /// Residual degree target.
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the partial coloring.
    #[arg(long)]
    pub partial_out: Option<String>,
    #[arg(long, default_value = "-")]
    pub records: String,
}

#[derive(Args)]
pub(crate) struct MincolorArgs {
    #[arg(long)]
    pub instance: String,
    #[arg(long, value_enum)]
    pub promise: PromiseArg,
    #[arg(long)]
    pub param: usize,
    /// Residual degree target for the reduction stage.
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "-")]
    pub records: String,
}

#[derive(Args)]
pub(crate) struct ExperimentArgs {
    /// Comma-separated arities, e.g. 3,5. Empty for an empty sweep.
    #[arg(long, default_value = "3")]
    pub ks: String,
    /// Comma-separated sum-norms, e.g. 1,1.5.
    #[arg(long, default_value = "1")]
    pub ls: String,
    /// Planted instance size for min-coloring cells.
    #[arg(long, default_value_t = 120)]
    pub n: usize,
    #[arg(long, default_value_t = 700)]
    pub m: usize,
    /// Reduction degree target for min-coloring cells.
    #[arg(long, default_value_t = 4)]
    pub t: usize,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    /// Monte Carlo samples per cell.
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Summary table path; existing cells are kept and skipped.
    #[arg(long)]
    pub out: String,
    #[arg(long, default_value = "-")]
    pub records: String,
    /// Upper bound on concurrent cells (cells are independent).
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::cmd_gen(a),
        Command::Solve(a) => commands::cmd_solve(a),
        Command::Round(a) => commands::cmd_round(a),
        Command::Cone(a) => commands::cmd_cone(a),
        Command::Reduce(a) => commands::cmd_reduce(a),
        Command::Mincolor(a) => commands::cmd_mincolor(a),
        Command::Experiment(a) => commands::cmd_experiment(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
