//! Ancilla-assisted process tomography of the fusion between photons 2 and 3.
//!
//! Two copies of the pair state feed the process; photons 1 and 4 act as
//! ancillas. For a rank-one analyzer `|π>` the post-selected probability is
//! linear in χ: `Tr(Π ρ₄) = Σ_ab χ_ab <π|P_a R P_b†|π> = Tr(χ A)` with
//! `R = ρ_pair ⊗ ρ_pair`, `P_a = I ⊗ σ_i ⊗ σ_j ⊗ I` and
//! `A[b,a] = (P_a|π>)† R (P_b|π>)`.

use nalgebra::{DMatrix, DVector};

use super::chi::ProcessChi;
use super::linear::hermitian_least_squares;
use super::mle::{minimize, project_psd, CountModel};
use super::{InitMode, MleConfig, MleResult};
use crate::error::{Error, Result};
use crate::optics::{pair_state, ProjectorSet};
use crate::qstate::{pauli_coordinates, pauli_pair, ComplexMatrix, DensityMatrix, C64, ZERO};
use crate::simulator::{apply_process, TomoExperiment};

const FUSED_PAIR: (usize, usize) = (1, 2);

/// Post-selection success probability of `chi` on two ideal `ψ⁺` pairs; the
/// reconstructed χ is scaled so that this equals the ideal value 1/2.
pub fn success_probability_ideal(chi: &ProcessChi) -> Result<f64> {
    let bell = pair_state(0.0).density();
    let (_, success) = apply_process(&bell.tensor(&bell), chi, FUSED_PAIR)?;
    Ok(success)
}

const IDEAL_SUCCESS: f64 = 0.5;

fn embed_on_middle(a: usize) -> ComplexMatrix {
    let i2 = ComplexMatrix::identity(2);
    i2.kron(&pauli_pair(a)).kron(&i2)
}

/// Effect matrices `A_s` with `Tr(Π_s ρ₄) = Tr(χ A_s)` for every setting.
pub fn aapt_effects(rho_pair: &DensityMatrix, set: &ProjectorSet) -> Result<Vec<ComplexMatrix>> {
    if rho_pair.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_pair.dim(),
        });
    }
    if set.n_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            found: 1 << set.n_qubits(),
        });
    }
    let r = rho_pair.tensor(rho_pair).into_matrix();
    let paulis: Vec<ComplexMatrix> = (0..16).map(embed_on_middle).collect();
    Ok(set
        .settings()
        .iter()
        .map(|setting| {
            let pi = setting.ket();
            let u: Vec<Vec<C64>> = paulis.iter().map(|p| p.apply(&pi)).collect();
            let ru: Vec<Vec<C64>> = u.iter().map(|v| r.apply(v)).collect();
            let mut effect = ComplexMatrix::zeros(16);
            for a in 0..16 {
                for b in 0..16 {
                    let g: C64 = u[a].iter().zip(&ru[b]).map(|(x, y)| x.conj() * y).sum();
                    effect[(b, a)] = g;
                }
            }
            effect
        })
        .collect())
}

/// Coordinates of each effect in the 16×16 Pauli-string basis, one row per setting.
fn effect_design(effects: &[ComplexMatrix]) -> DMatrix<f64> {
    let coords: Vec<Vec<C64>> = effects.iter().map(pauli_coordinates).collect();
    DMatrix::from_fn(effects.len(), 256, |s, k| coords[s][k].re)
}

/// Least-squares χ from frequencies, unconstrained (possibly non-PSD), in
/// the free scale of the counts.
fn linear_chi(effects: &[ComplexMatrix], counts: &[f64], exposures: &[f64]) -> Result<ComplexMatrix> {
    let design = effect_design(effects);
    let freq = DVector::from_iterator(
        counts.len(),
        counts.iter().zip(exposures).map(|(n, e)| n / e),
    );
    hermitian_least_squares(&design, &freq, 4)
}

fn check_inputs(rho_pair: &DensityMatrix, exp4: &TomoExperiment) -> Result<()> {
    if exp4.n_qubits() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: exp4.n_qubits(),
        });
    }
    if rho_pair.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_pair.n_qubits(),
        });
    }
    let set = &exp4.projector_set;
    if !set.is_complete() {
        return Err(Error::IncompleteProjectorSet {
            rank: set.operator_rank(),
            required: set.required_rank(),
        });
    }
    if exp4.total_counts() == 0 {
        return Err(Error::EmptyData);
    }
    Ok(())
}

/// Linear-inversion χ normalized to the ideal-success convention; the result
/// is Hermitian but may be non-PSD, so it is returned as a bare matrix.
pub fn linear_inversion_aapt(rho_pair: &DensityMatrix, exp4: &TomoExperiment) -> Result<ComplexMatrix> {
    check_inputs(rho_pair, exp4)?;
    let effects = aapt_effects(rho_pair, &exp4.projector_set)?;
    let (counts, exposures) = exp4.aggregate();
    let raw = linear_chi(&effects, &counts, &exposures)?;
    // ψ⁺ ancillas make the success probability equal to Tr χ
    let trace = raw.trace().re;
    if !(trace > 0.0) {
        return Err(Error::InvalidChi(format!("linear estimate has trace {trace}")));
    }
    Ok(raw.scale_real(IDEAL_SUCCESS / trace))
}

/// Maximum-likelihood fusion χ from a fixed pair density matrix and
/// four-photon tomography data.
///
/// The fit runs with a free χ scale, since the post-selected rate is unknown,
/// and the result is rescaled so that `success_probability_ideal(χ) = 1/2`.
pub fn mle_aapt(
    rho_pair: &DensityMatrix,
    exp4: &TomoExperiment,
    cfg: &MleConfig,
) -> Result<MleResult<ProcessChi>> {
    cfg.validate()?;
    check_inputs(rho_pair, exp4)?;
    let effects = aapt_effects(rho_pair, &exp4.projector_set)?;
    let (counts, exposures) = exp4.aggregate();
    let init = match cfg.init {
        InitMode::LinearInversionProjected => {
            project_psd(&linear_chi(&effects, &counts, &exposures)?)
        }
        InitMode::IdentitySeeded => {
            // still reject data that cannot identify χ
            linear_chi(&effects, &counts, &exposures)?;
            ComplexMatrix::identity(16)
        }
    };
    if init.as_slice().iter().all(|z| *z == ZERO) {
        return Err(Error::InvalidChi("linear estimate has no positive part".into()));
    }
    let model = CountModel {
        effects,
        exposures,
        counts,
    };
    let fit = minimize(&model, &init, cfg)?;

    let raw = fit.x.hermitize();
    let provisional = ProcessChi::new(raw.scale_real(1.0 / raw.trace().re))?;
    let success = success_probability_ideal(&provisional)?;
    if !(success > 0.0) {
        return Err(Error::InvalidChi(
            "fitted process never succeeds on ideal input pairs".into(),
        ));
    }
    let chi = ProcessChi::new(provisional.matrix().scale_real(IDEAL_SUCCESS / success))?;
    Ok(MleResult {
        estimate: chi,
        negative_log_likelihood: fit.nll,
        iterations: fit.iterations,
        converged: fit.converged,
        gradient_norm: fit.gradient_norm,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{ideal_chi, standard_projector_set, Scheme};

    #[test]
    fn effects_reproduce_forward_model() {
        let pair = pair_state(0.3)
            .density()
            .mix(&DensityMatrix::maximally_mixed(2), 0.8)
            .unwrap();
        let chi = ideal_chi().depolarized(0.2).unwrap();
        let set = standard_projector_set(4, Scheme::Minimal).unwrap();
        let effects = aapt_effects(&pair, &set).unwrap();
        let (out, _) = apply_process(&pair.tensor(&pair), &chi, (1, 2)).unwrap();
        for (s, a) in effects.iter().enumerate() {
            let direct = out.trace_product(&set.projector(s)).re;
            let linear = chi.matrix().trace_product(a);
            assert!((direct - linear.re).abs() < 1e-14);
            assert!(linear.im.abs() < 1e-14);
            assert!(a.hermitian_deviation() < 1e-14);
        }
    }

    #[test]
    fn ideal_success_is_trace_for_bell_ancillas() {
        for eps in [0.0, 0.3, 1.0] {
            let chi = ideal_chi().depolarized(eps).unwrap();
            assert!((success_probability_ideal(&chi).unwrap() - chi.trace()).abs() < 1e-14);
        }
    }
}
