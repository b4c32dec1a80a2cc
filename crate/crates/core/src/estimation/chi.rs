use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{eig_unchecked, pauli_pair, ComplexMatrix, Tolerances, C64};

pub const CHI_INDEX_ORDER: &str =
    "row/column a = 4i + j for the Pauli product sigma_i (x) sigma_j on the fused pair";

/// Process matrix over the two-qubit Pauli products `σ_i ⊗ σ_j`, indexed by
/// `a = 4i + j`. The map is `ρ ↦ Σ_ab χ_ab P_a ρ P_b†`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessChi {
    matrix: ComplexMatrix,
}

impl ProcessChi {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::default())
    }

    pub fn new_with(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.dim() != 16 {
            return Err(Error::InvalidChi(format!(
                "χ must be 16×16, got {0}×{0}",
                matrix.dim()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidChi("non-finite entries".into()));
        }
        let herm = matrix.hermitian_deviation();
        if herm > tol.hermitian {
            return Err(Error::InvalidChi(format!("not Hermitian ({herm:e})")));
        }
        let min_eig = eig_unchecked(&matrix.hermitize()).min_value();
        if min_eig < -tol.psd {
            return Err(Error::InvalidChi(format!("negative eigenvalue {min_eig:e}")));
        }
        let trace = matrix.trace().re;
        if !(trace > 0.0 && trace <= 1.0 + tol.psd) {
            return Err(Error::InvalidChi(format!("trace {trace} outside (0, 1]")));
        }
        Ok(Self { matrix })
    }

    /// χ of the identity process (all weight on `σ0 ⊗ σ0`).
    pub fn identity_process() -> Self {
        let mut m = ComplexMatrix::zeros(16);
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// Uniform Pauli noise `trace · I₁₆ / 16`.
    pub fn isotropic(trace: f64) -> Result<Self> {
        Self::new(ComplexMatrix::identity(16).scale_real(trace / 16.0))
    }

    /// `(1 - ε)·self + ε·isotropic`, with the isotropic part at the same trace as `self`.
    pub fn depolarized(&self, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!(
                "noise fraction {epsilon} outside [0,1]"
            )));
        }
        let iso = Self::isotropic(self.trace())?;
        let mut m = self.matrix.scale_real(1.0 - epsilon);
        m.add_scaled(&iso.matrix, C64::new(epsilon, 0.0));
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Σ_ab χ_ab P_a ⊗ conj(P_b)` as a pair superoperator.
    pub fn superoperator(&self) -> crate::qstate::local::PairSuperoperator {
        let eig = eig_unchecked(&self.matrix);
        let ops: Vec<ComplexMatrix> = eig
            .values
            .iter()
            .zip(&eig.vectors)
            .filter(|(l, _)| **l > 0.0)
            .map(|(l, v)| kraus_operator(*l, v))
            .collect();
        crate::qstate::local::PairSuperoperator::from_kraus(&ops)
    }
}

/// `√λ Σ_a v_a P_a`
pub(crate) fn kraus_operator(lambda: f64, v: &[C64]) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(4);
    for (a, &va) in v.iter().enumerate() {
        if va != C64::default() {
            k.add_scaled(&pauli_pair(a), va * lambda.sqrt());
        }
    }
    k
}

#[derive(Serialize, Deserialize)]
struct ChiJson {
    index_order: String,
    #[serde(flatten)]
    matrix: ComplexMatrix,
}

impl Serialize for ProcessChi {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ChiJson {
            index_order: CHI_INDEX_ORDER.to_string(),
            matrix: self.matrix.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProcessChi {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ChiJson::deserialize(deserializer)?;
        ProcessChi::new(raw.matrix).map_err(serde::de::Error::custom)
    }
}
