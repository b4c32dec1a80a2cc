use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::qstate::{from_pauli_coordinates, ComplexMatrix, C64};
use crate::simulator::TomoExperiment;

/// Least-squares Hermitian `X` (dimension `2^m`) solving `design · c = rhs`,
/// where `c_k = Tr(X Q_k)` are Pauli coordinates and `X = Σ c_k Q_k / 2^m`.
pub(crate) fn hermitian_least_squares(
    design: &DMatrix<f64>,
    rhs: &DVector<f64>,
    n_qubits: usize,
) -> Result<ComplexMatrix> {
    let unknowns = design.ncols();
    let svd = design.clone().svd(true, true);
    // σ_i / σ_max > 1e-5 is the frame-operator eigenvalue test at 1e-10
    let largest = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-5 * largest)
        .count();
    if rank < unknowns || !(largest > 0.0) {
        return Err(Error::RankDeficient {
            rank,
            required: unknowns,
        });
    }
    let coords = svd
        .solve(rhs, 1e-12)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    debug_assert_eq!(coords.len(), 1 << (2 * n_qubits));
    let coords: Vec<C64> = coords.iter().map(|&c| C64::new(c, 0.0)).collect();
    Ok(from_pauli_coordinates(&coords).hermitize())
}

/// Linear-inversion state estimate: solves `Tr(ρ Π_s) = counts_s / exposure_s`
/// in least squares, then Hermitizes and normalizes the trace. The result may
/// have negative eigenvalues.
pub fn linear_inversion_qst(exp: &TomoExperiment) -> Result<ComplexMatrix> {
    let set = &exp.projector_set;
    if !set.is_complete() {
        return Err(Error::IncompleteProjectorSet {
            rank: set.operator_rank(),
            required: set.required_rank(),
        });
    }
    if exp.total_counts() == 0 {
        return Err(Error::EmptyData);
    }
    let (counts, exposure) = exp.aggregate();
    let freq = DVector::from_iterator(
        counts.len(),
        counts.iter().zip(&exposure).map(|(n, e)| n / e),
    );
    let raw = hermitian_least_squares(&set.pauli_design(), &freq, set.n_qubits())?;
    let trace = raw.trace().re;
    if !(trace > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "linear inversion produced trace {trace}"
        )));
    }
    Ok(raw.scale_real(1.0 / trace))
}
