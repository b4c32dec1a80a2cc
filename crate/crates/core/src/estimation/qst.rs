use super::linear::linear_inversion_qst;
use super::mle::{minimize, project_psd, CountModel};
use super::{InitMode, MleConfig, MleResult};
use crate::error::{Error, Result};
use crate::qstate::{ComplexMatrix, DensityMatrix};
use crate::simulator::TomoExperiment;

/// Maximum-likelihood density matrix `ρ = T T† / Tr(T T†)`.
///
/// Non-convergence is not an error: the best iterate is returned with
/// `converged = false`.
pub fn mle_qst(exp: &TomoExperiment, cfg: &MleConfig) -> Result<MleResult<DensityMatrix>> {
    cfg.validate()?;
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
    let (counts, exposures) = exp.aggregate();
    let model = CountModel {
        effects: set.projectors(),
        exposures,
        counts,
    };
    let dim = 1usize << set.n_qubits();
    let init = match cfg.init {
        InitMode::LinearInversionProjected => project_psd(&linear_inversion_qst(exp)?),
        InitMode::IdentitySeeded => ComplexMatrix::identity(dim),
    };
    let fit = minimize(&model, &init, cfg)?;
    Ok(MleResult {
        estimate: DensityMatrix::from_unnormalized(&fit.x)?,
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
    use crate::estimation::mle::{minimize, CountModel};
    use crate::estimation::Likelihood;
    use crate::optics::{pair_state, standard_projector_set, Scheme};
    use crate::qstate::{fidelity_with_pure, validate_density};
    use crate::simulator::simulate_counts;

    #[test]
    fn bell_state_in_paper_regime() {
        let psi = pair_state(0.0);
        let set = standard_projector_set(2, Scheme::Overcomplete).unwrap();
        let exp = simulate_counts(&psi.density(), &set, 40_000.0, 30.0, 1).unwrap();
        let res = mle_qst(&exp, &MleConfig::default()).unwrap();
        assert!(res.converged, "gradient {}", res.gradient_norm);
        assert!(res.gradient_norm < 1e-8);
        assert!(fidelity_with_pure(&res.estimate, &psi).unwrap() >= 0.999);
    }

    #[test]
    fn maximally_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(2);
        let set = standard_projector_set(2, Scheme::Overcomplete).unwrap();
        let exp = simulate_counts(&rho, &set, 40_000.0, 30.0, 2).unwrap();
        for likelihood in [Likelihood::GaussianPoisson, Likelihood::ExactPoisson] {
            let cfg = MleConfig {
                likelihood,
                ..MleConfig::default()
            };
            let res = mle_qst(&exp, &cfg).unwrap();
            assert!(res.converged);
            assert!(res.estimate.trace_distance(&rho).unwrap() < 0.01);
        }
    }

    #[test]
    fn zero_counts_rejected() {
        let set = standard_projector_set(2, Scheme::Minimal).unwrap();
        let exp = simulate_counts(&pair_state(0.0).density(), &set, 10.0, 1.0, 3)
            .unwrap()
            .with_counts(|_, _| 0);
        assert!(matches!(mle_qst(&exp, &MleConfig::default()), Err(Error::EmptyData)));
    }

    #[test]
    fn physical_and_monotone_on_sparse_data() {
        let set = standard_projector_set(2, Scheme::Minimal).unwrap();
        let rho = pair_state(0.4).density();
        for seed in 0..8 {
            let exp = simulate_counts(&rho, &set, 15.0, 1.0, seed).unwrap();
            if exp.total_counts() == 0 {
                continue;
            }
            for init in [InitMode::LinearInversionProjected, InitMode::IdentitySeeded] {
                let cfg = MleConfig {
                    init,
                    ..MleConfig::default()
                };
                let res = mle_qst(&exp, &cfg).unwrap();
                assert!(validate_density(res.estimate.matrix()).is_ok());

                let (counts, exposures) = exp.aggregate();
                let model = CountModel {
                    effects: set.projectors(),
                    exposures,
                    counts,
                };
                let fit = minimize(&model, &ComplexMatrix::identity(4), &cfg).unwrap();
                assert!(fit.trace.windows(2).all(|w| w[1] <= w[0]));
            }
        }
    }
}
