mod common;

use std::time::Instant;

use ghz_tomo::analysis::{ghz_fidelity, visibility};
use ghz_tomo::composer::{compose_ghz, compose_series, kraus_from_chi, ComposerConfig};
use ghz_tomo::optics::{ideal_chi, pair_state};
use ghz_tomo::qstate::trace_distance;

#[test]
fn matches_dense_construction() {
    let mut rng = common::rng(7);
    for draw in 0..5 {
        let pair = common::random_pair(0.3, &mut rng);
        let chi = common::random_chi(0.4, &mut rng);
        for n in [4, 6] {
            let (fast, p_fast) = compose_ghz(&pair, &chi, n).unwrap();
            let (dense, p_dense) = common::dense_composition(&pair, &chi, n);
            let d = trace_distance(fast.matrix(), &dense).unwrap();
            assert!(d < 1e-9, "draw {draw}, n {n}: trace distance {d}");
            assert!((p_fast - p_dense).abs() < 1e-12);
        }
    }
}

#[test]
fn kraus_sets_are_trace_non_increasing() {
    let mut rng = common::rng(8);
    for _ in 0..5 {
        let chi = common::random_chi(0.5, &mut rng);
        let set = kraus_from_chi(&chi, 1e-12).unwrap();
        assert!(set.completeness_norm() <= 1.0 + 1e-8);
        assert!(set.to_chi_matrix().max_abs_diff(chi.matrix()) < 1e-9);
        let rho = common::random_pair(0.5, &mut rng);
        let direct = ghz_tomo::simulator::apply_process(&rho, &chi, (0, 1)).unwrap().0;
        assert!(set.apply(rho.matrix()).unwrap().max_abs_diff(&direct) < 1e-9);
    }
}

#[test]
fn twelve_photons_ideal_and_noisy() {
    let psi = pair_state(0.0).density();
    let start = Instant::now();
    let (rho, p) = compose_ghz(&psi, &ideal_chi(), 12).unwrap();
    assert!((ghz_fidelity(&rho, 12).unwrap() - 1.0).abs() < 1e-9);
    assert!((p - 2f64.powi(-5)).abs() < 1e-9);
    assert!((visibility(&rho) - 1.0).abs() < 1e-9);
    drop(rho);
    eprintln!("n = 12 composition: {:?}", start.elapsed());

    let chi = ideal_chi().depolarized(0.1).unwrap();
    let mut fids = Vec::new();
    compose_series(&psi, &chi, 12, &ComposerConfig::default(), |c| {
        fids.push(ghz_fidelity(&c.state, c.n_photons)?);
        Ok(())
    })
    .unwrap();
    assert_eq!(fids.len(), 5);
    assert!(fids.windows(2).all(|w| w[1] < w[0]), "{fids:?}");
}
