//! Two-qubit operators acting on an adjacent qubit pair of a large dense
//! matrix, applied by index slicing instead of building `I ⊗ K ⊗ I`.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::state::qubits_for_dim;
use crate::error::{Error, Result};

/// Adjacent qubit pair `(first, first + 1)`, 0-based with qubit 0 most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdjacentPair {
    first: usize,
}

impl AdjacentPair {
    pub fn new(first: usize, second: usize, n_qubits: usize) -> Result<Self> {
        if second != first + 1 {
            return Err(Error::NonAdjacentTargets(first, second));
        }
        if second >= n_qubits {
            return Err(Error::QubitIndex {
                index: second,
                n_qubits,
            });
        }
        Ok(Self { first })
    }

    pub fn first(self) -> usize {
        self.first
    }

    /// Bit position of the second (less significant) qubit of the pair.
    fn shift(self, n_qubits: usize) -> usize {
        n_qubits - 2 - self.first
    }
}

/// Superoperator on one qubit pair, `S[(a,b),(a',b')]` with
/// `ρ'[a,b] = Σ S[(a,b),(a',b')] ρ[a',b']` on the pair's local indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSuperoperator {
    entries: [C64; 256],
}

impl PairSuperoperator {
    /// `Σ_r K_r ⊗ conj(K_r)`
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Self {
        let mut entries = [ZERO; 256];
        for k in ops {
            assert_eq!(k.dim(), 4, "Kraus operators act on a qubit pair");
            for a in 0..4 {
                for b in 0..4 {
                    for ap in 0..4 {
                        let ka = k[(a, ap)];
                        if ka == ZERO {
                            continue;
                        }
                        for bp in 0..4 {
                            entries[(a * 4 + b) * 16 + ap * 4 + bp] += ka * k[(b, bp)].conj();
                        }
                    }
                }
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[C64; 256] {
        &self.entries
    }
}

fn rest_indices(n_qubits: usize, shift: usize) -> Vec<usize> {
    let dim = 1usize << n_qubits;
    let low_mask = (1usize << shift) - 1;
    (0..dim / 4)
        .map(|r| ((r & !low_mask) << 2) | (r & low_mask))
        .collect()
}

fn check_dim(m: &ComplexMatrix, pair: AdjacentPair) -> Result<usize> {
    let n = qubits_for_dim(m.dim())?;
    if pair.first + 1 >= n {
        return Err(Error::QubitIndex {
            index: pair.first + 1,
            n_qubits: n,
        });
    }
    Ok(n)
}

/// `m ← (I ⊗ op ⊗ I) · m`
pub fn left_apply(m: &mut ComplexMatrix, pair: AdjacentPair, op: &ComplexMatrix) -> Result<()> {
    let n = check_dim(m, pair)?;
    let dim = m.dim();
    let shift = pair.shift(n);
    let offsets: [usize; 4] = std::array::from_fn(|l| l << shift);
    let data = m.as_mut_slice();
    let mut rows = vec![ZERO; 4 * dim];
    for base in rest_indices(n, shift) {
        for (l, off) in offsets.iter().enumerate() {
            let r = base + off;
            rows[l * dim..(l + 1) * dim].copy_from_slice(&data[r * dim..(r + 1) * dim]);
        }
        for (a, off) in offsets.iter().enumerate() {
            let r = base + off;
            let out = &mut data[r * dim..(r + 1) * dim];
            out.fill(ZERO);
            for ap in 0..4 {
                let k = op[(a, ap)];
                if k == ZERO {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(&rows[ap * dim..(ap + 1) * dim]) {
                    *o += k * v;
                }
            }
        }
    }
    Ok(())
}

/// `m ← m · (I ⊗ op ⊗ I)†`
pub fn right_apply_adjoint(
    m: &mut ComplexMatrix,
    pair: AdjacentPair,
    op: &ComplexMatrix,
) -> Result<()> {
    let n = check_dim(m, pair)?;
    let dim = m.dim();
    let shift = pair.shift(n);
    let offsets: [usize; 4] = std::array::from_fn(|l| l << shift);
    let rest = rest_indices(n, shift);
    let conj: [[C64; 4]; 4] = std::array::from_fn(|b| std::array::from_fn(|bp| op[(b, bp)].conj()));
    let data = m.as_mut_slice();
    for row in data.chunks_exact_mut(dim) {
        for &base in &rest {
            let v: [C64; 4] = std::array::from_fn(|l| row[base + offsets[l]]);
            for b in 0..4 {
                row[base + offsets[b]] = (0..4).map(|bp| v[bp] * conj[b][bp]).sum();
            }
        }
    }
    Ok(())
}

/// Applies a pair superoperator in place, one 4×4 local block at a time.
pub fn apply_superoperator(
    m: &mut ComplexMatrix,
    pair: AdjacentPair,
    superop: &PairSuperoperator,
) -> Result<()> {
    let n = check_dim(m, pair)?;
    let dim = m.dim();
    let shift = pair.shift(n);
    let offsets: [usize; 4] = std::array::from_fn(|l| l << shift);
    let rest = rest_indices(n, shift);
    let s = &superop.entries;
    let data = m.as_mut_slice();
    let mut block = [ZERO; 16];
    for &x in &rest {
        for &y in &rest {
            for a in 0..4 {
                let row = (x + offsets[a]) * dim + y;
                for b in 0..4 {
                    block[a * 4 + b] = data[row + offsets[b]];
                }
            }
            for a in 0..4 {
                let row = (x + offsets[a]) * dim + y;
                for b in 0..4 {
                    let coeffs = &s[(a * 4 + b) * 16..(a * 4 + b + 1) * 16];
                    let mut acc = ZERO;
                    for (c, v) in coeffs.iter().zip(&block) {
                        acc += c * v;
                    }
                    data[row + offsets[b]] = acc;
                }
            }
        }
    }
    Ok(())
}
