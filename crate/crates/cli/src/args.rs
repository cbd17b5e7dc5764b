use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hardedge",
    version,
    about = "Smallest-eigenvalue laws of correlated Wishart matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the finite-size gap probability and density: `t,gap,pmin`.
    Exact(ExactArgs),
    /// Tabulate the hard-edge limit laws: `u,gap,pmin`.
    Micro(MicroArgs),
    /// Draw a batch of smallest eigenvalues.
    Sample(SampleArgs),
    /// Compare a fresh batch with an analytic law by Kolmogorov-Smirnov.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Dyson index: 1 real, 2 complex.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub beta: u32,
    /// Number of rows; inferred from the spectrum when omitted.
    #[arg(long)]
    pub p: Option<usize>,
    /// Number of columns.
    #[arg(long)]
    pub n: usize,
    /// Population eigenvalues, one per line.
    #[arg(long)]
    pub spectrum: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    /// Defaults to the point where the gap probability falls to 1e-4.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub t_steps: usize,
    /// Add a `t_over_n` column for the `WW†/n` normalization.
    #[arg(long)]
    pub c_normalization: bool,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MicroArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub beta: u32,
    /// Rectangularity `β(n−p+1)/2 − 1`.
    #[arg(long)]
    pub gamma: usize,
    /// Values at or below zero are raised to 1e-3.
    #[arg(long, default_value_t = crate::commands::DEFAULT_U_MIN, allow_negative_numbers = true)]
    pub u_min: f64,
    #[arg(long, default_value_t = 40.0)]
    pub u_max: f64,
    #[arg(long, default_value_t = 400)]
    pub u_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 50_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Right-multiply every sample by a Haar matrix before diagonalizing.
    #[arg(long)]
    pub rotate: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub batch: BatchArgs,
    /// Output CSV; metadata goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Micro,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub batch: BatchArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Column count used for the analytic law; defaults to `--n`.
    #[arg(long)]
    pub law_n: Option<usize>,
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Replace the asymptotic Kolmogorov threshold.
    #[arg(long)]
    pub ks_threshold: Option<f64>,
    /// JSON report; the histogram goes next to it with a `.hist.csv` extension.
    #[arg(long)]
    pub out: PathBuf,
}
