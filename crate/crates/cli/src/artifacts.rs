//! On-disk formats exchanged between subcommands. Every artifact carries a
//! provenance block; bare library types are accepted on input as well.

use std::fs;
use std::path::{Path, PathBuf};

use ghz_tomo::analysis::Provenance;
use ghz_tomo::estimation::{MleConfig, MleResult, ProcessChi};
use ghz_tomo::qstate::DensityMatrix;
use ghz_tomo::simulator::TomoExperiment;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitSummary {
    pub converged: bool,
    pub iterations: usize,
    pub negative_log_likelihood: f64,
    pub gradient_norm: f64,
    pub config: MleConfig,
}

impl FitSummary {
    pub fn of<T>(r: &MleResult<T>) -> Self {
        Self {
            converged: r.converged,
            iterations: r.iterations,
            negative_log_likelihood: r.negative_log_likelihood,
            gradient_norm: r.gradient_norm,
            config: r.config,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentArtifact {
    pub provenance: Provenance,
    pub experiment: TomoExperiment,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairArtifact {
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    pub fidelity_psi_plus: f64,
    pub density_matrix: DensityMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChiArtifact {
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    pub success_probability_ideal: f64,
    pub chi: ProcessChi,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateArtifact {
    pub provenance: Provenance,
    pub n: usize,
    pub success_probability: f64,
    pub fidelity: f64,
    pub visibility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_matrix: Option<DensityMatrix>,
}

enum Either<A, B> {
    Wrapped(A),
    Bare(B),
}

/// Raw bytes plus the path they came from, kept for hashing.
pub struct Input {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::input(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            bytes,
        })
    }

    pub fn name(&self) -> String {
        self.path.display().to_string()
    }

    /// Wrapped artifact when the top level has a `provenance` key, otherwise
    /// the bare library value; either way serde names the offending field.
    fn parse<A: DeserializeOwned, B: DeserializeOwned>(&self) -> Result<Either<A, B>, CliError> {
        let value: serde_json::Value =
            serde_json::from_slice(&self.bytes).map_err(|e| CliError::input(&self.path, e))?;
        let wrapped = value.get("provenance").is_some();
        let err = |e: serde_json::Error| CliError::input(&self.path, e);
        if wrapped {
            serde_json::from_value(value).map(Either::Wrapped).map_err(err)
        } else {
            serde_json::from_value(value).map(Either::Bare).map_err(err)
        }
    }

    pub fn experiment(&self) -> Result<TomoExperiment, CliError> {
        Ok(match self.parse::<ExperimentArtifact, TomoExperiment>()? {
            Either::Wrapped(a) => a.experiment,
            Either::Bare(e) => e,
        })
    }

    pub fn pair(&self) -> Result<DensityMatrix, CliError> {
        let rho = match self.parse::<PairArtifact, DensityMatrix>()? {
            Either::Wrapped(a) => a.density_matrix,
            Either::Bare(r) => r,
        };
        if rho.n_qubits() != 2 {
            return Err(CliError::input(
                &self.path,
                format!("density_matrix: expected 2 qubits, found {}", rho.n_qubits()),
            ));
        }
        Ok(rho)
    }

    pub fn chi(&self) -> Result<ProcessChi, CliError> {
        Ok(match self.parse::<ChiArtifact, ProcessChi>()? {
            Either::Wrapped(a) => a.chi,
            Either::Bare(c) => c,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::input(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(path, e))
}
