use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Simulate Gibbs point processes and fit them by Point Process Learning or
/// Takacs-Fiksel estimation.
#[derive(Debug, Parser)]
#[command(name = "ppl", version, propagate_version = true)]
pub struct Cli {
    /// Print diagnostics on stderr as single-line JSON
    #[arg(long, global = true)]
    pub json_errors: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw patterns from a model and write one CSV per replication
    Simulate(SimulateArgs),
    /// Estimate model parameters from a pattern file
    Fit(FitArgs),
    /// Replicated PPL vs TF study, written as an MSE table
    Study(StudyArgs),
    /// Distance between scaled CV prediction errors and the innovation
    #[command(name = "tf-limit")]
    TfLimit(TfLimitArgs),
    /// Mean innovation at the true parameter over simulated patterns
    #[command(name = "gnz-check")]
    GnzCheck(GnzArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model as JSON, e.g. '{"family":"strauss","beta":100,"R":0.05,"gamma":0.5}'
    #[arg(long)]
    pub model: Option<String>,
    /// Window as JSON '{"x_min":0,"x_max":1,"y_min":0,"y_max":1}' [default: unit square]
    #[arg(long)]
    pub window: Option<String>,
    /// Number of replications [default: 1]
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Birth-death proposals per pattern [default: 100000]
    #[arg(long)]
    pub mcmc_steps: Option<u64>,
    /// Leading proposals discarded [default: half of --mcmc-steps]
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Output directory, created if missing [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Pattern CSV with columns x,y; the window is read from <file>.window.json
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    /// poisson, hardcore, strauss or geyer
    #[arg(long)]
    pub family: Option<String>,
    /// ppl or tf [default: ppl]
    #[arg(long)]
    pub method: Option<String>,
    /// Monte-Carlo CV retention probability [default: 0.5]
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of CV folds [default: 25]
    #[arg(long)]
    pub k: Option<usize>,
    /// p, p-over-1mp or estimate [default: p]
    #[arg(long)]
    pub weight: Option<String>,
    /// l1, l2 or l3 [default: l1]
    #[arg(long)]
    pub loss: Option<String>,
    /// Test function exponent [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Parameter grid as a JSON array of axes, or 'adaptive' for hardcore
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// poisson, hardcore, strauss, geyer, or a study config JSON file
    #[arg(long)]
    pub scenario: String,
    /// Number of replications
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of CV folds
    #[arg(long)]
    pub k: Option<usize>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV [default: results.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TfLimitArgs {
    /// poisson, hardcore, strauss or geyer
    #[arg(long)]
    pub scenario: Option<String>,
    /// Comma-separated fold counts, e.g. 4,16,64
    #[arg(long, value_delimiter = ',')]
    pub k_list: Option<Vec<usize>>,
    /// mc or block [default: mc]
    #[arg(long)]
    pub mode: Option<String>,
    /// Patterns per k [default: 50]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GnzArgs {
    /// poisson, hardcore, strauss or geyer
    #[arg(long)]
    pub scenario: Option<String>,
    /// Simulated patterns [default: 100]
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with defaults for any of the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}
