//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! The exported functions are thin wrappers; the plain functions they call
//! are native Rust and tested natively.

use ghz_tomo::analysis::{full_report, ThresholdTable};
use ghz_tomo::composer::compose_ghz;
use ghz_tomo::optics::{ideal_chi, pair_state, waveplate_jones, WavePlate};
use ghz_tomo::qstate::{ComplexMatrix, DensityMatrix};
use ghz_tomo::{Error, Result};
use wasm_bindgen::prelude::*;

/// Largest photon number drawn as a heatmap (256×256 cells).
pub const HEATMAP_MAX_N: usize = 8;

/// ψ⁺ mixed with white noise so that its overlap with ψ⁺ is `fidelity`.
pub fn noisy_pair(fidelity: f64, phi: f64) -> Result<DensityMatrix> {
    if !(0.25..=1.0).contains(&fidelity) {
        return Err(Error::InvalidArgument(format!(
            "pair fidelity must lie in [0.25, 1], got {fidelity}"
        )));
    }
    let noise = (1.0 - fidelity) / 0.75;
    pair_state(phi)
        .density()
        .mix(&DensityMatrix::maximally_mixed(2), 1.0 - noise)
}

/// Report table for n = 4, 6, …, `n_max` as JSON.
pub fn curve_json(pair_fidelity: f64, fusion_noise: f64, n_max: usize) -> Result<String> {
    let pair = noisy_pair(pair_fidelity, 0.0)?;
    let chi = ideal_chi().depolarized(fusion_noise)?;
    full_report(&pair, &chi, n_max, &ThresholdTable::default())?.to_json()
}

/// Real parts of the composed n-photon density matrix, row-major.
pub fn density_real(pair_fidelity: f64, fusion_noise: f64, n: usize) -> Result<Vec<f64>> {
    if n > HEATMAP_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "heatmap limited to n ≤ {HEATMAP_MAX_N}, got {n}"
        )));
    }
    let pair = noisy_pair(pair_fidelity, 0.0)?;
    let chi = ideal_chi().depolarized(fusion_noise)?;
    let (rho, _) = compose_ghz(&pair, &chi, n)?;
    Ok(rho.matrix().as_slice().iter().map(|z| z.re).collect())
}

/// Quarter- then half-wave plate in front of the beam splitter.
fn analyzer(qwp_deg: f64, hwp_deg: f64) -> ComplexMatrix {
    let q = waveplate_jones(&WavePlate::quarter(qwp_deg.to_radians()));
    let h = waveplate_jones(&WavePlate::half(hwp_deg.to_radians()));
    h.matmul(&q)
}

/// Coincidence probabilities `[hh, hv, vh, vv]` behind two analyzers.
pub fn coincidences(plates: [f64; 4], pair_fidelity: f64, phi: f64) -> Result<[f64; 4]> {
    let rho = noisy_pair(pair_fidelity, phi)?;
    let u = analyzer(plates[0], plates[1]).kron(&analyzer(plates[2], plates[3]));
    let out = u.matmul(rho.matrix()).matmul(&u.adjoint());
    Ok([0, 1, 2, 3].map(|k| out[(k, k)].re))
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn ghz_curve(pair_fidelity: f64, fusion_noise: f64, n_max: usize) -> std::result::Result<String, JsError> {
    curve_json(pair_fidelity, fusion_noise, n_max).map_err(js)
}

#[wasm_bindgen]
pub fn density_heatmap(pair_fidelity: f64, fusion_noise: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    density_real(pair_fidelity, fusion_noise, n).map_err(js)
}

#[wasm_bindgen]
pub fn analyzer_probabilities(
    qwp1_deg: f64,
    hwp1_deg: f64,
    qwp2_deg: f64,
    hwp2_deg: f64,
    pair_fidelity: f64,
    phi: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    coincidences([qwp1_deg, hwp1_deg, qwp2_deg, hwp2_deg], pair_fidelity, phi)
        .map(|p| p.to_vec())
        .map_err(js)
}
