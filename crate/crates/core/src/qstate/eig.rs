use nalgebra::SymmetricEigen;

use super::matrix::{ComplexMatrix, C64};
use super::Tolerances;
use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`. Each vector's
    /// largest-magnitude component is made real and positive.
    pub vectors: Vec<Vec<C64>>,
}

impl HermitianEigen {
    /// `Σ λ_k v_k v_k†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.values.len();
        let mut out = ComplexMatrix::zeros(dim);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            out.add_scaled(&ComplexMatrix::projector(v), C64::new(lambda, 0.0));
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with(m, &Tolerances::default())
}

pub fn eig_hermitian_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    let deviation = m.hermitian_deviation();
    if deviation > tol.hermitian {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(eig_unchecked(&m.hermitize()))
}

pub(crate) fn eig_unchecked(m: &ComplexMatrix) -> HermitianEigen {
    let dim = m.dim();
    let decomposition = SymmetricEigen::new(m.to_nalgebra());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        decomposition.eigenvalues[b]
            .partial_cmp(&decomposition.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&k| decomposition.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let col = decomposition.eigenvectors.column(k);
            let mut v: Vec<C64> = col.iter().copied().collect();
            fix_phase(&mut v);
            v
        })
        .collect();
    HermitianEigen { values, vectors }
}

fn fix_phase(v: &mut [C64]) {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
        .unwrap_or_default();
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Numerical rank of a real symmetric matrix: eigenvalues above `rel_tol * λ_max`.
pub(crate) fn symmetric_rank(m: &nalgebra::DMatrix<f64>, rel_tol: f64) -> usize {
    let values = SymmetricEigen::new(m.clone()).eigenvalues;
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if largest == 0.0 {
        return 0;
    }
    values.iter().filter(|v| v.abs() > rel_tol * largest).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::pauli::{pauli, PauliIndex};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        m.hermitize()
    }

    #[test]
    fn pauli_z_spectrum() {
        let e = eig_hermitian(&pauli(PauliIndex::Z)).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&ComplexMatrix::identity(4)).unwrap();
        for v in e.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bell_projector_is_rank_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::default(), C64::new(s, 0.0), C64::new(s, 0.0), C64::default()];
        let e = eig_hermitian(&ComplexMatrix::projector(&psi)).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        for v in &e.values[1..] {
            assert!(v.abs() < 1e-14);
        }
        assert!((e.vectors[0][1] - C64::new(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(1e-6, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn reconstructs_large_random_matrix() {
        let m = random_hermitian(256, 11);
        let e = eig_hermitian(&m).unwrap();
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn round_trip_random(dim in 1usize..=32, seed in any::<u64>()) {
            let m = random_hermitian(dim, seed);
            let e = eig_hermitian(&m).unwrap();
            prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
