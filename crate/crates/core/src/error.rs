use thiserror::Error;

use crate::qstate::DensityDiagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(DensityDiagnostics),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed measurement setting: {0}")]
    InvalidSetting(String),

    #[error("projector set is incomplete: operator-space rank {rank} < {required}")]
    IncompleteProjectorSet { rank: usize, required: usize },

    #[error("no counts recorded in any setting")]
    EmptyData,

    #[error("tomography data are rank deficient: rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("invalid process matrix: {0}")]
    InvalidChi(String),

    #[error("process targets ({0}, {1}) are not adjacent qubits")]
    NonAdjacentTargets(usize, usize),

    #[error("memory budget exceeded: {required} bytes required, {budget} bytes configured")]
    MemoryBudget { required: u64, budget: u64 },

    #[error("no Kraus operator survives cutoff {cutoff:e} (largest eigenvalue {largest:e})")]
    EmptyKrausSet { cutoff: f64, largest: f64 },

    #[error("estimator failed to converge in {failed} of {total} bootstrap samples")]
    BootstrapFailures { failed: usize, total: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
