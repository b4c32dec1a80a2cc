//! Tomography and composition of recursively fused multiphoton GHZ states.
//!
//! A polarization-entangled pair source is characterized by state tomography,
//! the polarizing-beam-splitter fusion by ancilla-assisted process tomography
//! (a 16×16 χ matrix over two-qubit Pauli products), and the two are combined
//! to build the density matrix of the GHZ state of any even photon number.

pub mod analysis;
pub mod composer;
pub mod error;
pub mod estimation;
pub mod optics;
pub mod qstate;
pub mod simulator;

pub use error::{Error, Result};
