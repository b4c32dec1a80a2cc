//! Maximum-likelihood state tomography (QST) and ancilla-assisted process
//! tomography (AAPT) of the fusion χ matrix.

mod aapt;
mod chi;
mod linear;
mod mle;
mod qst;

use serde::{Deserialize, Serialize};

pub use aapt::{aapt_effects, linear_inversion_aapt, mle_aapt, success_probability_ideal};
pub use chi::{ProcessChi, CHI_INDEX_ORDER};
pub(crate) use chi::kraus_operator;
pub use linear::linear_inversion_qst;
pub use qst::mle_qst;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// Linear inversion, negative eigenvalues clipped to zero.
    LinearInversionProjected,
    IdentitySeeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Likelihood {
    /// `Σ (n - μ)² / (2μ + 1)`
    GaussianPoisson,
    /// `Σ μ - n ln μ`
    ExactPoisson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleConfig {
    pub max_iterations: usize,
    /// Euclidean norm of the gradient of the per-count objective.
    pub gradient_tolerance: f64,
    pub init: InitMode,
    pub likelihood: Likelihood,
    /// Number of L-BFGS correction pairs kept.
    pub history: usize,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gradient_tolerance: 1e-8,
            init: InitMode::LinearInversionProjected,
            likelihood: Likelihood::GaussianPoisson,
            history: 12,
        }
    }
}

impl MleConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.gradient_tolerance > 0.0) || self.max_iterations == 0 || self.history == 0 {
            return Err(crate::Error::InvalidArgument(
                "MLE tolerances and iteration limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleResult<T> {
    pub estimate: T,
    /// Final value of the configured negative log-likelihood (summed over settings).
    pub negative_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub config: MleConfig,
}
