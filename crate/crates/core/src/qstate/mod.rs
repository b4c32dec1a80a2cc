//! Complex linear algebra and quantum-state primitives.
//!
//! Conventions used throughout the crate: qubit 0 (photon 1) is the most
//! significant tensor factor, `|h> = (1,0)` and `|v> = (0,1)`.

mod eig;
pub mod local;
mod matrix;
mod pauli;
mod state;

pub use eig::{eig_hermitian, eig_hermitian_with, HermitianEigen};
pub(crate) use eig::{eig_unchecked, symmetric_rank};
pub use matrix::{tensor, tensor_vec, ComplexMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use pauli::{
    from_pauli_coordinates, pauli, pauli_basis, pauli_coordinates, pauli_pair, pauli_string,
    PauliIndex,
};
pub use state::{
    expectation, fidelity_with_pure, partial_trace, trace_distance, validate_density,
    validate_density_with, DensityDiagnostics, DensityMatrix, PureState, Tolerances,
};
