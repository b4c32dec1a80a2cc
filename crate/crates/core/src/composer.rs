//! N-photon GHZ density matrices from one pair state and one fusion χ.
//!
//! Pairs are appended one at a time and the fusion acts on the two photons
//! straddling each junction, so only photons 1 and N are never fused. The
//! χ map is applied as a 16×16 superoperator on local 4×4 blocks of the full
//! matrix: O(4ⁿ) work per fusion and a single 2ⁿ×2ⁿ working matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::kraus_operator;
use crate::estimation::ProcessChi;
use crate::qstate::local::{apply_superoperator, AdjacentPair, PairSuperoperator};
use crate::qstate::{eig_unchecked, pauli_pair, ComplexMatrix, DensityMatrix, Tolerances, C64};

/// Kraus operators `K_m = √λ_m Σ_a v_m[a] P_a` from the eigenpairs of χ.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

impl KrausSet {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Largest eigenvalue of `Σ K†K`; at most 1 for a trace-non-increasing map.
    pub fn completeness_norm(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(4);
        for k in &self.operators {
            sum.add_scaled(&k.adjoint().matmul(k), C64::new(1.0, 0.0));
        }
        eig_unchecked(&sum.hermitize()).max_value()
    }

    /// χ rebuilt from Pauli coordinates `c_a = Tr(P_a K) / 4` of each operator.
    pub fn to_chi_matrix(&self) -> ComplexMatrix {
        let paulis: Vec<ComplexMatrix> = (0..16).map(pauli_pair).collect();
        let mut chi = ComplexMatrix::zeros(16);
        for k in &self.operators {
            let c: Vec<C64> = paulis.iter().map(|p| p.matmul(k).trace() / 4.0).collect();
            for a in 0..16 {
                for b in 0..16 {
                    chi[(a, b)] += c[a] * c[b].conj();
                }
            }
        }
        chi
    }

    /// `Σ K ρ K†` on a two-qubit matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(4);
        for k in &self.operators {
            out.add_scaled(&k.matmul(rho).matmul(&k.adjoint()), C64::new(1.0, 0.0));
        }
        Ok(out)
    }

    pub fn superoperator(&self) -> PairSuperoperator {
        PairSuperoperator::from_kraus(&self.operators)
    }
}

/// Keeps eigenpairs of χ with `λ > cutoff` (absolute).
pub fn kraus_from_chi(chi: &ProcessChi, cutoff: f64) -> Result<KrausSet> {
    if !(cutoff >= 0.0) {
        return Err(Error::InvalidArgument(format!("Kraus cutoff {cutoff} must be ≥ 0")));
    }
    let eig = eig_unchecked(chi.matrix());
    let largest = eig.max_value();
    let (operators, weights) = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .filter(|(l, _)| **l > cutoff)
        .map(|(&l, v)| (kraus_operator(l, v), l))
        .unzip::<_, _, Vec<_>, Vec<_>>();
    if operators.is_empty() {
        return Err(Error::EmptyKrausSet { cutoff, largest });
    }
    Ok(KrausSet { operators, weights })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComposerConfig {
    pub max_n: usize,
    pub memory_budget_bytes: u64,
    /// Eigenvalue cutoff relative to the largest eigenvalue of χ.
    pub kraus_cutoff: f64,
    /// Renormalize after every fusion instead of once at the end.
    pub renormalize_each_step: bool,
}

impl Default for ComposerConfig {
    fn default() -> Self {
        Self {
            max_n: 12,
            memory_budget_bytes: 4 << 30,
            kraus_cutoff: 1e-12,
            renormalize_each_step: false,
        }
    }
}

/// Fusion pairs for an n-photon composition, 1-based photon labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionPlan {
    pub n_photons: usize,
    pub fusion_pairs: Vec<(usize, usize)>,
    pub renormalize_at_end: bool,
}

impl CompositionPlan {
    pub fn new(n_photons: usize, cfg: &ComposerConfig) -> Result<Self> {
        if n_photons < 2 || n_photons % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "photon number must be even and ≥ 2, got {n_photons}"
            )));
        }
        if n_photons > cfg.max_n {
            return Err(Error::InvalidArgument(format!(
                "photon number {n_photons} exceeds configured maximum {}",
                cfg.max_n
            )));
        }
        let required = required_bytes(n_photons);
        if required > cfg.memory_budget_bytes {
            return Err(Error::MemoryBudget {
                required,
                budget: cfg.memory_budget_bytes,
            });
        }
        Ok(Self {
            n_photons,
            fusion_pairs: (1..n_photons / 2).map(|k| (2 * k, 2 * k + 1)).collect(),
            renormalize_at_end: !cfg.renormalize_each_step,
        })
    }
}

/// Peak bytes: the n-qubit matrix plus the (n−2)-qubit one it is built from.
pub fn required_bytes(n_photons: usize) -> u64 {
    let entry = std::mem::size_of::<C64>() as u64;
    let big = 1u64 << (2 * n_photons);
    let small = if n_photons > 2 { big / 16 } else { 0 };
    (big + small) * entry
}

/// Composed state for one photon number.
#[derive(Clone, Debug)]
pub struct Composed {
    pub n_photons: usize,
    pub state: DensityMatrix,
    /// Product of the post-selection probabilities of all fusions.
    pub success_probability: f64,
}

fn scale_in_place(m: &mut ComplexMatrix, factor: f64) {
    for z in m.as_mut_slice() {
        *z *= factor;
    }
}

fn check_pair(rho_pair: &DensityMatrix) -> Result<()> {
    if rho_pair.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_pair.dim(),
        });
    }
    Ok(())
}

fn superoperator_for(chi: &ProcessChi, cfg: &ComposerConfig) -> Result<PairSuperoperator> {
    let largest = eig_unchecked(chi.matrix()).max_value();
    Ok(kraus_from_chi(chi, cfg.kraus_cutoff * largest)?.superoperator())
}

/// Runs the fusions for 4, 6, …, `n_max` photons in one pass and hands each
/// normalized intermediate state to `visit`. The state is borrowed, so large
/// matrices are never copied.
pub fn compose_series(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    n_max: usize,
    cfg: &ComposerConfig,
    mut visit: impl FnMut(&Composed) -> Result<()>,
) -> Result<()> {
    check_pair(rho_pair)?;
    let plan = CompositionPlan::new(n_max, cfg)?;
    let superop = superoperator_for(chi, cfg)?;
    let tol = Tolerances::default();
    let pair = rho_pair.matrix();
    let mut state = pair.clone();
    let mut success = 1.0;
    for (k, &(first, _)) in plan.fusion_pairs.iter().enumerate() {
        let n = 2 * k + 4;
        state = state.kron(pair);
        // photons `first`, `first + 1` are 0-based qubits `first - 1`, `first`
        apply_superoperator(&mut state, AdjacentPair::new(first - 1, first, n)?, &superop)?;
        let p = state.trace().re;
        if !(p > 0.0) {
            return Err(Error::InvalidChi(format!(
                "fusion into {n} photons has success probability {p}"
            )));
        }
        scale_in_place(&mut state, 1.0 / p);
        success *= p;
        let composed = Composed {
            n_photons: n,
            state: DensityMatrix::from_cp_output(state, &tol)?,
            success_probability: success,
        };
        visit(&composed)?;
        state = composed.state.into_matrix();
    }
    Ok(())
}

/// n-photon state with the default configuration.
pub fn compose_ghz(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    n: usize,
) -> Result<(DensityMatrix, f64)> {
    compose_ghz_with(rho_pair, chi, n, &ComposerConfig::default())
}

pub fn compose_ghz_with(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    n: usize,
    cfg: &ComposerConfig,
) -> Result<(DensityMatrix, f64)> {
    check_pair(rho_pair)?;
    let plan = CompositionPlan::new(n, cfg)?;
    if plan.fusion_pairs.is_empty() {
        return Ok((rho_pair.clone(), 1.0));
    }
    if cfg.renormalize_each_step {
        let mut out = None;
        compose_series(rho_pair, chi, n, cfg, |c| {
            if c.n_photons == n {
                out = Some((c.state.clone(), c.success_probability));
            }
            Ok(())
        })?;
        return Ok(out.expect("series reaches n"));
    }
    let superop = superoperator_for(chi, cfg)?;
    let pair = rho_pair.matrix();
    let mut state = pair.clone();
    for (k, &(first, _)) in plan.fusion_pairs.iter().enumerate() {
        state = state.kron(pair);
        apply_superoperator(&mut state, AdjacentPair::new(first - 1, first, 2 * k + 4)?, &superop)?;
    }
    let success = state.trace().re;
    if !(success > 0.0) {
        return Err(Error::InvalidChi(format!("composition has success probability {success}")));
    }
    scale_in_place(&mut state, 1.0 / success);
    let rho = DensityMatrix::from_cp_output(state, &Tolerances::default())?;
    Ok((rho, success))
}
