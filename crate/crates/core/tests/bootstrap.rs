mod common;

use ghz_tomo::analysis::{
    bootstrap_pipeline, sample_means, BootstrapConfig, ThresholdTable,
};
use ghz_tomo::composer::compose_ghz;
use ghz_tomo::estimation::{linear_inversion_aapt, mle_qst, MleConfig};
use ghz_tomo::optics::{ghz_state, ideal_chi, pair_state, standard_projector_set, Scheme};
use ghz_tomo::qstate::{DensityMatrix, C64};
use ghz_tomo::simulator::{simulate_counts, simulate_fusion_counts, Acquisition, TomoExperiment};

fn paper_pair() -> DensityMatrix {
    pair_state(0.0).density().mix(&DensityMatrix::maximally_mixed(2), 0.9693).unwrap()
}

fn pair_data(pair: &DensityMatrix) -> TomoExperiment {
    let set = standard_projector_set(2, Scheme::Overcomplete).unwrap();
    simulate_counts(pair, &set, 40_000.0, 30.0, 1).unwrap()
}

/// First-order Poisson propagation through the linear-inversion estimator:
/// `Var F ≈ Σ_s (∂F/∂n_s)² n_s`, derivatives by forward differences.
fn delta_method_std(pair: &DensityMatrix, exp4: &TomoExperiment) -> f64 {
    let ghz = ghz_state(4).unwrap();
    let g = ghz.amplitudes();
    let fidelity = |exp: &TomoExperiment| {
        let chi = linear_inversion_aapt(pair, exp).unwrap();
        let (rho, _) = common::dense_composition_raw(pair, &chi, 4);
        let v = rho.apply(g);
        g.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().re
    };
    let base = fidelity(exp4);
    let mut var = 0.0;
    for (k, rec) in exp4.records.iter().enumerate() {
        let h = (rec.counts as f64).sqrt().max(1.0).round() as u64;
        let up = exp4.with_counts(|i, r| if i == k { r.counts + h } else { r.counts });
        let g = (fidelity(&up) - base) / h as f64;
        var += g * g * rec.counts as f64;
    }
    var.sqrt()
}

#[test]
fn spread_on_noiseless_data_respects_poisson_propagation() {
    let pair = paper_pair();
    let chi = ideal_chi().depolarized(0.1).unwrap();
    let rho4 = compose_ghz(&pair, &chi, 4).unwrap().0;
    let set4 = standard_projector_set(4, Scheme::Minimal).unwrap();
    let exp4 = common::noiseless_experiment(&rho4, &set4, 8.5, 30.0 * 78.0);
    let bound = delta_method_std(&pair, &exp4);

    let cfg = BootstrapConfig {
        samples: 30,
        seed: 21,
        ..BootstrapConfig::default()
    };
    let out = bootstrap_pipeline(&pair_data(&pair), &exp4, &cfg, &[4], &ThresholdTable::default()).unwrap();
    let std = out.report.rows[0].fidelity_error.unwrap();
    // the constrained fit cannot be noisier than the unconstrained linear one,
    // up to the sampling error of a 30-sample standard deviation
    assert!(std < 1.4 * bound, "bootstrap std {std} vs propagated {bound}");
    assert!(std > 0.3 * bound, "bootstrap std {std} vs propagated {bound}");
}

#[test]
fn means_approach_point_estimates_with_more_counts() {
    let pair = paper_pair();
    let chi = ideal_chi().depolarized(0.1).unwrap();
    let exp_pair = pair_data(&pair);
    let set4 = standard_projector_set(4, Scheme::Minimal).unwrap();
    for repeats in [78, 78 * 16] {
        let acq = Acquisition::new(8.5, 30.0, repeats).unwrap();
        let exp4 = simulate_fusion_counts(&pair, &chi, &set4, &acq, 4).unwrap();
        let cfg = BootstrapConfig {
            samples: 16,
            seed: 5,
            ..BootstrapConfig::default()
        };
        let out = bootstrap_pipeline(&exp_pair, &exp4, &cfg, &[4], &ThresholdTable::default()).unwrap();
        let (mean_f, _) = sample_means(&out)[0];
        let row = &out.report.rows[0];
        let std = row.fidelity_error.unwrap();
        // point estimate vs sample mean: combined error of the two
        assert!((mean_f - row.fidelity).abs() < 2.0 * std * (1.0 + 1.0 / 4.0), "repeats {repeats}");
    }
}

#[test]
fn reproducible_and_seed_sensitive() {
    let pair = paper_pair();
    let chi = ideal_chi().depolarized(0.1).unwrap();
    let set4 = standard_projector_set(4, Scheme::Minimal).unwrap();
    let exp4 = simulate_fusion_counts(&pair, &chi, &set4, &Acquisition::new(8.5, 30.0, 78).unwrap(), 9).unwrap();
    let exp_pair = pair_data(&pair);
    let run = |seed| {
        let cfg = BootstrapConfig {
            samples: 4,
            seed,
            ..BootstrapConfig::default()
        };
        bootstrap_pipeline(&exp_pair, &exp4, &cfg, &[4, 6], &ThresholdTable::default()).unwrap()
    };
    let a = run(1);
    let b = run(1);
    let c = run(2);
    assert_eq!(a.report.to_json().unwrap(), b.report.to_json().unwrap());
    assert_ne!(a.report.to_json().unwrap(), c.report.to_json().unwrap());
    // point estimates do not depend on the bootstrap seed
    assert_eq!(a.report.rows[0].fidelity, c.report.rows[0].fidelity);

    let mut csv = Vec::new();
    a.write_samples_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next(), Some("sample,n,fidelity,visibility"));
    assert_eq!(text.lines().count(), 1 + 4 * 2);
}

#[test]
fn pair_estimate_is_reused() {
    let pair = paper_pair();
    let exp_pair = pair_data(&pair);
    let fit = mle_qst(&exp_pair, &MleConfig::default()).unwrap();
    assert!(fit.converged);
    assert!((ghz_tomo::qstate::fidelity_with_pure(&fit.estimate, &pair_state(0.0)).unwrap() - 0.977).abs() < 0.005);
}
