use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eig::{eig_hermitian_with, eig_unchecked};
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Numerical tolerance profile shared by every validity check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entry of `|m - m†|`.
    pub hermitian: f64,
    /// Allowed `|Tr ρ - 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue is `-psd`.
    pub psd: f64,
    /// Allowed `| ||ψ||² - 1 |`.
    pub norm: f64,
    /// Imaginary residue tolerated in quantities that must be real.
    pub imaginary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            psd: 1e-8,
            norm: 1e-12,
            imaginary: 1e-10,
        }
    }
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Normalized state vector over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > Tolerances::default().norm {
            return Err(Error::InvalidArgument(format!(
                "state has squared norm {norm}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: super::matrix::tensor_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::projector(&self.amplitudes),
        }
    }
}

/// Which density-matrix invariant a candidate matrix violates, and by how much.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DensityDiagnostics {
    pub dimension: Option<usize>,
    pub non_finite: bool,
    /// Max `|m - m†|` entry, when above tolerance.
    pub hermiticity: Option<f64>,
    /// `Tr m - 1`, when above tolerance.
    pub trace_error: Option<f64>,
    /// Most negative eigenvalue, when below `-psd`.
    pub negative_eigenvalue: Option<f64>,
}

impl DensityDiagnostics {
    pub fn is_valid(&self) -> bool {
        *self == Self::default()
    }
}

impl fmt::Display for DensityDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(d) = self.dimension {
            parts.push(format!("dimension {d} is not a power of two"));
        }
        if self.non_finite {
            parts.push("non-finite entries".to_string());
        }
        if let Some(h) = self.hermiticity {
            parts.push(format!("Hermiticity violated by {h:e}"));
        }
        if let Some(t) = self.trace_error {
            parts.push(format!("trace differs from 1 by {t:e}"));
        }
        if let Some(e) = self.negative_eigenvalue {
            parts.push(format!("negative eigenvalue {e:e}"));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

/// Checks every density-matrix invariant, returning all violations at once.
pub fn validate_density(m: &ComplexMatrix) -> std::result::Result<DensityMatrix, DensityDiagnostics> {
    validate_density_with(m, &Tolerances::default())
}

pub fn validate_density_with(
    m: &ComplexMatrix,
    tol: &Tolerances,
) -> std::result::Result<DensityMatrix, DensityDiagnostics> {
    let mut diag = DensityDiagnostics::default();
    let n_qubits = match qubits_for_dim(m.dim()) {
        Ok(n) => n,
        Err(_) => {
            diag.dimension = Some(m.dim());
            0
        }
    };
    if !m.is_finite() {
        diag.non_finite = true;
        return Err(diag);
    }
    let herm = m.hermitian_deviation();
    if herm > tol.hermitian {
        diag.hermiticity = Some(herm);
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
        diag.trace_error = Some(trace.re - 1.0);
    }
    let min_eig = eig_unchecked(&m.hermitize()).min_value();
    if min_eig < -tol.psd {
        diag.negative_eigenvalue = Some(min_eig);
    }
    if diag.is_valid() {
        Ok(DensityMatrix {
            n_qubits,
            matrix: m.clone(),
        })
    } else {
        Err(diag)
    }
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(&m).map_err(Error::InvalidDensity)
    }

    /// `I / 2^n`
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Wraps the output of a completely positive map applied to a valid state.
    ///
    /// Positivity is inherited from the map, so only Hermiticity and trace
    /// are checked; this keeps the O(d³) eigen check off 4096-dimensional states.
    pub(crate) fn from_cp_output(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.dim())?;
        let mut diag = DensityDiagnostics::default();
        let herm = matrix.hermitian_deviation();
        if herm > tol.hermitian {
            diag.hermiticity = Some(herm);
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol.trace {
            diag.trace_error = Some(trace.re - 1.0);
        }
        if !diag.is_valid() {
            return Err(Error::InvalidDensity(diag));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Rescales a non-zero PSD matrix to unit trace and validates it.
    pub fn from_unnormalized(m: &ComplexMatrix) -> Result<Self> {
        let trace = m.trace().re;
        if trace <= 0.0 || !trace.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize matrix with trace {trace}"
            )));
        }
        Self::new(m.hermitize().scale_real(1.0 / trace))
    }

    /// Convex mixture `p·self + (1-p)·other`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0,1]")));
        }
        let mut m = self.matrix.scale_real(p);
        m.add_scaled(&other.matrix, C64::new(1.0 - p, 0.0));
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_unchecked(&self.matrix).values
    }

    /// `½ ||ρ - σ||₁`
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        trace_distance(&self.matrix, &other.matrix)
    }
}

/// `½ Σ |λ_k(a - b)|` for Hermitian `a`, `b`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = a - b;
    let e = eig_hermitian_with(&diff, &Tolerances {
        hermitian: 1e-8,
        ..Tolerances::default()
    })?;
    Ok(0.5 * e.values.iter().map(|v| v.abs()).sum::<f64>())
}

/// Reduced state over the qubits in `keep`, listed in their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    for (pos, &q) in keep.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitIndex {
                index: q,
                n_qubits: n,
            });
        }
        if keep[..pos].contains(&q) {
            return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
        }
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |value: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| value >> (qubits.len() - 1 - k) & 1 == 1)
            .map(|(_, &q)| bit(q))
            .sum()
    };

    let out_dim = 1usize << kept.len();
    let env_dim = 1usize << traced.len();
    let mut out = ComplexMatrix::zeros(out_dim);
    for i in 0..out_dim {
        let row_base = spread(i, &kept);
        for j in 0..out_dim {
            let col_base = spread(j, &kept);
            let mut acc = ZERO;
            for e in 0..env_dim {
                let env = spread(e, &traced);
                acc += rho.matrix[(row_base | env, col_base | env)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix {
        n_qubits: kept.len(),
        matrix: out,
    })
}

/// `<ψ|ρ|ψ>`, skipping zero amplitudes so sparse targets such as GHZ states
/// cost O(k²) for k non-zero amplitudes.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi.amplitudes.len(),
        });
    }
    let support: Vec<(usize, C64)> = psi
        .amplitudes
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| *a != ZERO)
        .collect();
    let mut acc = ZERO;
    for &(i, ai) in &support {
        for &(j, aj) in &support {
            acc += ai.conj() * rho.matrix[(i, j)] * aj;
        }
    }
    debug_assert!(acc.im.abs() < 1e-8);
    Ok(acc.re)
}

/// `Tr(ρ · obs)` for a Hermitian observable.
pub fn expectation(rho: &DensityMatrix, obs: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: obs.dim(),
        });
    }
    let tol = Tolerances::default();
    let deviation = obs.hermitian_deviation();
    if deviation > tol.hermitian {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(rho.matrix.trace_product(obs).re)
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    n_qubits: usize,
    qubit_order: String,
    #[serde(flatten)]
    matrix: ComplexMatrix,
}

pub(crate) const QUBIT_ORDER: &str = "photon 1 is the most significant tensor factor; |h>=(1,0), |v>=(0,1)";

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DensityJson {
            n_qubits: self.n_qubits,
            qubit_order: QUBIT_ORDER.to_string(),
            matrix: self.matrix.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = DensityJson::deserialize(deserializer)?;
        let rho = DensityMatrix::new(raw.matrix).map_err(serde::de::Error::custom)?;
        if rho.n_qubits != raw.n_qubits {
            return Err(serde::de::Error::custom(format!(
                "n_qubits {} does not match matrix dimension {}",
                raw.n_qubits,
                rho.dim()
            )));
        }
        Ok(rho)
    }
}
