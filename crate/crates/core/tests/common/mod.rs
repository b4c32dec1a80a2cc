//! Independent oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use ghz_tomo::estimation::ProcessChi;
use ghz_tomo::optics::{ideal_chi, pair_state};
use ghz_tomo::qstate::{pauli_pair, ComplexMatrix, DensityMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_row_major(data).unwrap()
}

/// Random full-rank PSD matrix `G G†` scaled to the given trace.
pub fn random_psd(dim: usize, trace: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = random_complex(dim, rng);
    let m = g.matmul(&g.adjoint()).hermitize();
    let t = m.trace().re;
    m.scale_real(trace / t)
}

/// ψ⁺ with random phase, mixed with a random state (weight `noise`).
pub fn random_pair(noise: f64, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let phi = rng.random_range(-0.3..0.3);
    let junk = DensityMatrix::new(random_psd(4, 1.0, rng)).unwrap();
    pair_state(phi).density().mix(&junk, 1.0 - noise).unwrap()
}

/// Ideal χ mixed with a random full-rank χ of the same trace.
pub fn random_chi(noise: f64, rng: &mut ChaCha8Rng) -> ProcessChi {
    let mut m = ideal_chi().matrix().scale_real(1.0 - noise);
    m.add_scaled(&random_psd(16, 0.5, rng), C64::new(noise, 0.0));
    ProcessChi::new(m).unwrap()
}

/// `I_{2^left} ⊗ op ⊗ I_{2^right}` built explicitly.
pub fn embed(op: &ComplexMatrix, left: usize, right: usize) -> ComplexMatrix {
    ComplexMatrix::identity(1 << left)
        .kron(op)
        .kron(&ComplexMatrix::identity(1 << right))
}

/// Dense evaluation of the recursive fusion: the full product of n/2 pairs,
/// then `ρ ↦ Σ_ab χ_ab E_a ρ E_b†` with fully embedded Pauli operators for
/// each junction in turn; returns the normalized state and success probability.
pub fn dense_composition(rho_pair: &DensityMatrix, chi: &ProcessChi, n: usize) -> (ComplexMatrix, f64) {
    dense_composition_raw(rho_pair, chi.matrix(), n)
}

/// As [`dense_composition`] for any Hermitian χ, physical or not.
pub fn dense_composition_raw(rho_pair: &DensityMatrix, chi: &ComplexMatrix, n: usize) -> (ComplexMatrix, f64) {
    let mut rho = rho_pair.matrix().clone();
    for _ in 1..n / 2 {
        rho = rho.kron(rho_pair.matrix());
    }
    for k in 1..n / 2 {
        // 1-based photons (2k, 2k+1): 2k-1 qubits before, n-2k-1 after
        let ops: Vec<ComplexMatrix> = (0..16)
            .map(|a| embed(&pauli_pair(a), 2 * k - 1, n - 2 * k - 1))
            .collect();
        let mut out = ComplexMatrix::zeros(rho.dim());
        for a in 0..16 {
            let left = ops[a].matmul(&rho);
            for b in 0..16 {
                let c = chi[(a, b)];
                if c != C64::new(0.0, 0.0) {
                    out.add_scaled(&left.matmul(&ops[b].adjoint()), c);
                }
            }
        }
        rho = out;
    }
    let p = rho.trace().re;
    (rho.scale_real(1.0 / p), p)
}

/// Mean and unbiased standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Records with counts equal to the rounded expectation `exposure · p_s`.
pub fn noiseless_experiment(
    rho: &DensityMatrix,
    set: &ghz_tomo::optics::ProjectorSet,
    rate_hz: f64,
    time_s: f64,
) -> ghz_tomo::simulator::TomoExperiment {
    use ghz_tomo::simulator::{outcome_probability, CountRecord, TomoExperiment};
    let records = (0..set.len())
        .map(|s| CountRecord {
            setting: s,
            counts: (rate_hz * time_s * outcome_probability(rho, &set.projector(s)).unwrap()).round() as u64,
            time_s,
            rate_hz,
        })
        .collect();
    TomoExperiment::new(set.clone(), records, String::new()).unwrap()
}
