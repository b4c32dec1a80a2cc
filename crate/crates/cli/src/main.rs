//! `ghz-tomo`: simulate or ingest tomography counts, reconstruct the pair
//! state and the fusion χ, compose N-photon GHZ states and report.
//!
//! Exit codes: 0 success, 1 estimator did not converge (outputs are still
//! written), 2 input or usage error.

mod artifacts;
mod commands;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ghz_tomo::estimation::{InitMode, Likelihood, MleConfig};
use ghz_tomo::optics::Scheme;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "ghz-tomo", version, about = "Pair and fusion tomography for multiphoton GHZ states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Simulate pair (2-photon) or fused (4-photon) tomography counts.
    Simulate(SimulateArgs),
    /// Maximum-likelihood pair density matrix from pair counts.
    Qst(QstArgs),
    /// Maximum-likelihood fusion χ from a pair matrix and 4-photon counts.
    Aapt(AaptArgs),
    /// Compose the n-photon GHZ density matrix.
    Compose(ComposeArgs),
    /// Fidelity and visibility table for n = 4, 6, …, n-max.
    Report(ReportArgs),
    /// Poissonian bootstrap of the fusion reconstruction.
    Bootstrap(BootstrapArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SchemeArg {
    Minimal,
    Overcomplete,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Minimal => Scheme::Minimal,
            SchemeArg::Overcomplete => Scheme::Overcomplete,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LikelihoodArg {
    GaussianPoisson,
    ExactPoisson,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InitArg {
    LinearInversion,
    Identity,
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    #[arg(long, value_enum, default_value = "gaussian-poisson")]
    likelihood: LikelihoodArg,
    #[arg(long, value_enum, default_value = "linear-inversion")]
    init: InitArg,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    gradient_tolerance: f64,
}

impl FitArgs {
    fn config(&self) -> MleConfig {
        MleConfig {
            max_iterations: self.max_iterations,
            gradient_tolerance: self.gradient_tolerance,
            init: match self.init {
                InitArg::LinearInversion => InitMode::LinearInversionProjected,
                InitArg::Identity => InitMode::IdentitySeeded,
            },
            likelihood: match self.likelihood {
                LikelihoodArg::GaussianPoisson => Likelihood::GaussianPoisson,
                LikelihoodArg::ExactPoisson => Likelihood::ExactPoisson,
            },
            ..MleConfig::default()
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    /// Relative phase of the pair state (h v + e^{iφ} v h)/√2.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    /// Weight of white noise I/4 mixed into the pair state.
    #[arg(long, default_value_t = 0.0)]
    white_noise: f64,
    /// Simulate post-selected 4-photon data behind the fusion instead of pair data.
    #[arg(long)]
    four_photon: bool,
    /// Isotropic noise fraction ε of the fusion χ (4-photon mode).
    #[arg(long, default_value_t = 0.0)]
    fusion_noise: f64,
    /// Events per second at unit outcome probability [default: 40000 pair, 8.5 four-photon].
    #[arg(long)]
    rate: Option<f64>,
    /// Integration time per setting, seconds.
    #[arg(long, default_value_t = 30.0)]
    time: f64,
    /// Repetitions of the whole setting sequence.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Projector set [default: overcomplete pair, minimal four-photon].
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// RNG seed; a random one is drawn and recorded when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct QstArgs {
    /// Pair tomography experiment (JSON).
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct AaptArgs {
    /// Pair density matrix (output of `qst`).
    #[arg(long)]
    pair: PathBuf,
    /// Four-photon tomography experiment (JSON).
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ComposeArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    chi: PathBuf,
    /// Even photon number.
    #[arg(long)]
    n: usize,
    /// Omit the density matrix (default for n ≥ 10).
    #[arg(long)]
    summary_only: bool,
    /// Write the density matrix even for n ≥ 10.
    #[arg(long, conflicts_with = "summary_only")]
    full_matrix: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ReportArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    chi: PathBuf,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Threshold table (JSON) with optional Żukowski entries.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct BootstrapArgs {
    /// Pair tomography experiment (JSON).
    #[arg(long)]
    pair_data: PathBuf,
    /// Four-photon tomography experiment (JSON).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Photon numbers 4, 6, …, n-max are analyzed.
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Also resample and refit the pair data.
    #[arg(long)]
    resample_pair: bool,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Failure category, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input file, argument or unwritable output: exit 2.
    Input(String),
    /// An estimator stopped before convergence; outputs were written: exit 1.
    NotConverged(String),
}

impl CliError {
    pub fn input(path: &Path, err: impl Display) -> Self {
        Self::Input(format!("{}: {err}", path.display()))
    }
}

impl From<ghz_tomo::Error> for CliError {
    fn from(e: ghz_tomo::Error) -> Self {
        Self::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Qst(a) => commands::qst(a),
        Command::Aapt(a) => commands::aapt(a),
        Command::Compose(a) => commands::compose(a),
        Command::Report(a) => commands::report(a),
        Command::Bootstrap(a) => commands::bootstrap(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::NotConverged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
