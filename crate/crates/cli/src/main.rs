//! `ergocast`: simulate noisy observations of ergodic maps, train kernel
//! forecasters, evaluate them, run consistency sweeps and check
//! regularization schedules.
//!
//! Exit status: 0 on success, 2 on invalid input or a refused schedule, 3 on
//! a numerical failure. The worker thread count follows `RAYON_NUM_THREADS`.

mod commands;
mod config;
mod diagnostics;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<ergocast::Error> for CliError {
    fn from(e: ergocast::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ergocast", version, about = "Kernel forecasters for noisy observations of ergodic dynamical systems")]
pub struct Cli {
    /// TOML experiment file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run sweeps whose schedule is not certified by any region statement.
    #[arg(long, global = true)]
    pub force: bool,
    /// Record wall times in the artifacts (breaks byte reproducibility).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an observation series `t,x_0,…` of length n + 1.
    Simulate(SimulateArgs),
    /// Train a forecaster and write a model file.
    Train(TrainArgs),
    /// Monte Carlo risks of a saved model, as JSON.
    Evaluate(EvaluateArgs),
    /// Consistency sweep over sample sizes, as CSV.
    Sweep(SweepArgs),
    /// Region verdicts and numeric traces for a schedule, as JSON.
    CheckSchedule(CheckScheduleArgs),
    /// Numeric checks of the supporting inequalities.
    Diagnostics(diagnostics::DiagnosticsArgs),
    /// Long-format `n,series,value` plot data from a sweep CSV.
    PlotData(PlotDataArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// tent, logistic4, circle2 or rotation[:alpha].
    #[arg(long)]
    pub system: Option<String>,
    /// none, uniform:B, asym:B or markov2:B:q.
    #[arg(long)]
    pub noise: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Observation CSV from `simulate`; simulated from the seed when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// ls, huber, logdist or eps:E.
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long)]
    pub model: PathBuf,
    /// Loss to evaluate; defaults to the training loss.
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub mc_m: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    /// power or logpower.
    #[arg(long)]
    pub form: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Prefactor of λ_n, in (0, 1].
    #[arg(long)]
    pub lambda_scale: Option<f64>,
    /// Prefactor of σ_n, at least 1.
    #[arg(long)]
    pub sigma_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub loss: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub mc_m: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckScheduleArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub loss: Option<String>,
    /// Correlation envelope: exp:rate:kappa, poly:power:kappa or none.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Restrict to one variant (S1, S2, S3, S1-LS, S2-LS, S3-LS).
    #[arg(long)]
    pub variant: Option<String>,
    /// Exponent of σ_n in the final S1 condition.
    #[arg(long)]
    pub sigma_exponent: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotDataArgs {
    /// Sweep CSV written by `sweep`.
    #[arg(long)]
    pub sweep: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
