use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Index into `{σ0, σ1, σ2, σ3} = {I, X, Y, Z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: Self = Self(0);
    pub const X: Self = Self(1);
    pub const Y: Self = Self(2);
    pub const Z: Self = Self(3);

    pub const ALL: [Self; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidArgument(format!(
                "Pauli index {value} outside 0..=3"
            )))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for PauliIndex {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PauliIndex> for u8 {
    fn from(p: PauliIndex) -> u8 {
        p.0
    }
}

pub fn pauli(i: PauliIndex) -> ComplexMatrix {
    let im = C64::new(0.0, 1.0);
    match i.0 {
        0 => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, ONE]]),
        1 => ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows([[ZERO, -im], [im, ZERO]]),
        _ => ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// Pauli string `σ_{i_0} ⊗ σ_{i_1} ⊗ …`, first index on the most significant qubit.
pub fn pauli_string(indices: &[PauliIndex]) -> ComplexMatrix {
    indices
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, &i| acc.kron(&pauli(i)))
}

/// Two-qubit Pauli product `σ_i ⊗ σ_j` for the flattened pair index `a = 4i + j`.
pub fn pauli_pair(a: usize) -> ComplexMatrix {
    assert!(a < 16, "pair index {a} out of range");
    pauli(PauliIndex(a as u8 / 4)).kron(&pauli(PauliIndex(a as u8 % 4)))
}

/// All `4^n` Pauli strings on `n` qubits, enumerated with the first qubit's
/// index most significant.
pub fn pauli_basis(n_qubits: usize) -> Vec<ComplexMatrix> {
    let count = 1usize << (2 * n_qubits);
    (0..count)
        .map(|k| {
            let indices: Vec<PauliIndex> = (0..n_qubits)
                .map(|q| PauliIndex(((k >> (2 * (n_qubits - 1 - q))) & 3) as u8))
                .collect();
            pauli_string(&indices)
        })
        .collect()
}

/// `Tr(m Q_k)` for every Pauli string `Q_k`, in [`pauli_basis`] order.
///
/// Splits off one qubit at a time: with `m = [[A, B], [C, D]]` the four
/// sub-problems are `A + D`, `B + C`, `i(B − C)` and `A − D`. O(n·4ⁿ).
pub fn pauli_coordinates(m: &ComplexMatrix) -> Vec<C64> {
    fn rec(m: &[C64], dim: usize, out: &mut [C64]) {
        if dim == 1 {
            out[0] = m[0];
            return;
        }
        let h = dim / 2;
        let quarter = h * h;
        let im = C64::new(0.0, 1.0);
        let mut subs = vec![ZERO; 4 * quarter];
        for r in 0..h {
            for c in 0..h {
                let a = m[r * dim + c];
                let b = m[r * dim + c + h];
                let cc = m[(r + h) * dim + c];
                let d = m[(r + h) * dim + c + h];
                let k = r * h + c;
                subs[k] = a + d;
                subs[quarter + k] = b + cc;
                subs[2 * quarter + k] = im * (b - cc);
                subs[3 * quarter + k] = a - d;
            }
        }
        for (p, chunk) in out.chunks_mut(quarter).enumerate() {
            rec(&subs[p * quarter..(p + 1) * quarter], h, chunk);
        }
    }
    let dim = m.dim();
    let mut out = vec![ZERO; dim * dim];
    rec(m.as_slice(), dim, &mut out);
    out
}

/// Inverse of [`pauli_coordinates`]: `Σ_k c_k Q_k / 2ⁿ`.
pub fn from_pauli_coordinates(coords: &[C64]) -> ComplexMatrix {
    fn rec(c: &[C64], dim: usize, out: &mut [C64]) {
        if dim == 1 {
            out[0] = c[0];
            return;
        }
        let h = dim / 2;
        let quarter = h * h;
        let mut subs = vec![ZERO; 4 * quarter];
        for (p, chunk) in subs.chunks_mut(quarter).enumerate() {
            rec(&c[p * quarter..(p + 1) * quarter], h, chunk);
        }
        let im = C64::new(0.0, 1.0);
        for r in 0..h {
            for col in 0..h {
                let k = r * h + col;
                let (mi, mx, my, mz) = (subs[k], subs[quarter + k], subs[2 * quarter + k], subs[3 * quarter + k]);
                out[r * dim + col] = (mi + mz) * 0.5;
                out[(r + h) * dim + col + h] = (mi - mz) * 0.5;
                out[r * dim + col + h] = (mx - im * my) * 0.5;
                out[(r + h) * dim + col] = (mx + im * my) * 0.5;
            }
        }
    }
    let count = coords.len();
    let dim = (count as f64).sqrt().round() as usize;
    assert!(dim * dim == count && dim.is_power_of_two(), "need 4^n coordinates");
    let mut out = vec![ZERO; count];
    rec(coords, dim, &mut out);
    ComplexMatrix::from_row_major(out).expect("square")
}
