use std::path::PathBuf;

use avwc_core::code::DEFAULT_DELTA;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "avwc", version, about = "Secrecy-rate evaluation and code audits for arbitrarily varying wiretap channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Artifact path; standard output when absent. For capacity and dagger a
    /// `.json` extension selects JSON instead of CSV.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Elementary-operation budget; defaults to AVWC_BUDGET or 1e8.
    #[arg(long, global = true)]
    pub budget: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OptimArgs {
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    /// Cap on the auxiliary alphabet size.
    #[arg(long)]
    pub u_cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    /// Codebook CSV (`j,l,word`); otherwise one is sampled.
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Number of messages; derived from the spec when absent.
    #[arg(long = "J")]
    pub j: Option<usize>,
    /// Number of randomisation indices; derived from the spec when absent.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Codeword letter weights, comma separated; uniform when absent.
    #[arg(long, value_delimiter = ',')]
    pub input: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// k-letter secrecy-rate term.
    Capacity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        optim: OptimArgs,
    },
    /// Single-letter rate over the compound list (or the legit channels).
    Dagger {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        optim: OptimArgs,
    },
    /// Strong degradedness, best eavesdropper, and the single-letter value.
    Degraded {
        #[arg(long)]
        spec: PathBuf,
        /// Legit state count; states are indexed s1 * s2 + s2'.
        #[arg(long)]
        s1: usize,
        #[arg(long)]
        s2: usize,
        /// Resolution of the grid over mixtures of legit states.
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[command(flatten)]
        optim: OptimArgs,
    },
    /// State whose eavesdropper channel dominates all others.
    BestEaves {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Hausdorff distance between two specs.
    Hausdorff {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Change of the rate estimate under random perturbations.
    Continuity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[command(flatten)]
        optim: OptimArgs,
    },
    /// Sample a wiretap code and report its error; the artifact is the codebook.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// Also run a Monte-Carlo error estimate with this many trials.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Leakage, resolvability and error audit over state sequences.
    Audit {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Monte-Carlo samples per state sequence in `mc` mode.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Audit this many seeded state sequences instead of all of S^n.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Permutation-averaged correlated code; the artifact is its manifest.
    Robustify {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// Number of permutations (identity first).
        #[arg(long, default_value_t = 8)]
        m: usize,
        /// Use the whole symmetric group (n <= 8).
        #[arg(long)]
        full: bool,
    },
    /// Robustification inequality for the code's success function.
    RtCheck {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// Hypothesis slack; the smallest admissible value when absent.
        #[arg(long)]
        eps: Option<f64>,
    },
}
