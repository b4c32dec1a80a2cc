use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::ghz_state;
use crate::qstate::{fidelity_with_pure, DensityMatrix};

pub const GENUINE_ENTANGLEMENT_FIDELITY: f64 = 0.5;

/// Overlap with the ideal n-photon GHZ state.
pub fn ghz_fidelity(rho: &DensityMatrix, n: usize) -> Result<f64> {
    if rho.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rho.n_qubits(),
        });
    }
    fidelity_with_pure(rho, &ghz_state(n)?)
}

/// `Tr(ρ X^⊗n)`. `X^⊗n` flips every bit, so only the anti-diagonal
/// `ρ[i, !i]` contributes.
pub fn visibility(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let dim = m.dim();
    (0..dim).map(|i| m[(i, dim - 1 - i)].re).sum()
}

/// Visibility above which the n-particle Mermin-type inequality is violated,
/// `2^{(1-n)/2}`.
pub fn mermin_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Mermin threshold needs n ≥ 2, got {n}"
        )));
    }
    Ok(2f64.powf((1.0 - n as f64) / 2.0))
}

/// Strictly above 50% fidelity.
pub fn genuine_entanglement(fidelity: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {fidelity} outside [0, 1]"
        )));
    }
    Ok(fidelity > GENUINE_ENTANGLEMENT_FIDELITY)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub mermin_visibility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zukowski_visibility: Option<f64>,
    #[serde(default = "default_ge")]
    pub genuine_entanglement_fidelity: f64,
}

fn default_ge() -> f64 {
    GENUINE_ENTANGLEMENT_FIDELITY
}

/// Per-photon-number thresholds. Żukowski-type values have no built-in
/// formula and only come from user input.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ThresholdTable {
    entries: BTreeMap<usize, ThresholdEntry>,
}

/// Input form: any subset of fields per n; missing Mermin values are filled
/// from the formula.
#[derive(Deserialize)]
struct PartialEntry {
    mermin_visibility: Option<f64>,
    zukowski_visibility: Option<f64>,
    genuine_entanglement_fidelity: Option<f64>,
}

#[derive(Deserialize)]
struct TableInput {
    entries: BTreeMap<usize, PartialEntry>,
}

impl ThresholdTable {
    /// Mermin thresholds only, for each `n` in `ns`.
    pub fn standard(ns: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for n in ns {
            entries.insert(
                n,
                ThresholdEntry {
                    mermin_visibility: mermin_threshold(n)?,
                    zukowski_visibility: None,
                    genuine_entanglement_fidelity: GENUINE_ENTANGLEMENT_FIDELITY,
                },
            );
        }
        Ok(Self { entries })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let input: TableInput = serde_json::from_str(text)?;
        let mut entries = BTreeMap::new();
        for (n, e) in input.entries {
            let entry = ThresholdEntry {
                mermin_visibility: match e.mermin_visibility {
                    Some(v) => v,
                    None => mermin_threshold(n)?,
                },
                zukowski_visibility: e.zukowski_visibility,
                genuine_entanglement_fidelity: e
                    .genuine_entanglement_fidelity
                    .unwrap_or(GENUINE_ENTANGLEMENT_FIDELITY),
            };
            validate_entry(n, &entry)?;
            entries.insert(n, entry);
        }
        Ok(Self { entries })
    }

    /// Adds Mermin-only entries for any `n` not yet present.
    pub fn covering(mut self, ns: impl IntoIterator<Item = usize>) -> Result<Self> {
        for n in ns {
            if !self.entries.contains_key(&n) {
                self.entries
                    .insert(n, *Self::standard([n])?.entries.get(&n).expect("inserted"));
            }
        }
        Ok(self)
    }

    pub fn set_zukowski(&mut self, n: usize, value: f64) -> Result<()> {
        let mut entry = match self.entries.get(&n) {
            Some(e) => *e,
            None => *Self::standard([n])?.entries.get(&n).expect("inserted"),
        };
        entry.zukowski_visibility = Some(value);
        validate_entry(n, &entry)?;
        self.entries.insert(n, entry);
        Ok(())
    }

    pub fn get(&self, n: usize) -> Option<&ThresholdEntry> {
        self.entries.get(&n)
    }

    pub fn entries(&self) -> &BTreeMap<usize, ThresholdEntry> {
        &self.entries
    }
}

fn validate_entry(n: usize, e: &ThresholdEntry) -> Result<()> {
    let check = |name: &str, v: f64| {
        if v > 0.0 && v <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "threshold {name} for n = {n} is {v}, expected (0, 1]"
            )))
        }
    };
    check("mermin_visibility", e.mermin_visibility)?;
    if let Some(z) = e.zukowski_visibility {
        check("zukowski_visibility", z)?;
    }
    check("genuine_entanglement_fidelity", e.genuine_entanglement_fidelity)
}

/// User-supplied Żukowski threshold for `n`, if configured.
pub fn zukowski_threshold(n: usize, table: &ThresholdTable) -> Option<f64> {
    table.get(n).and_then(|e| e.zukowski_visibility)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::ghz_state;

    fn noisy_ghz(n: usize, p: f64) -> DensityMatrix {
        ghz_state(n)
            .unwrap()
            .density()
            .mix(&DensityMatrix::maximally_mixed(n), p)
            .unwrap()
    }

    #[test]
    fn fidelity_and_visibility_of_mixtures() {
        for n in [2, 4, 6] {
            let mixed = DensityMatrix::maximally_mixed(n);
            let d = (1u64 << n) as f64;
            assert!((ghz_fidelity(&mixed, n).unwrap() - 1.0 / d).abs() < 1e-15);
            assert!(visibility(&mixed).abs() < 1e-15);
            for p in [0.0, 0.3, 1.0] {
                let rho = noisy_ghz(n, p);
                assert!((ghz_fidelity(&rho, n).unwrap() - (p + (1.0 - p) / d)).abs() < 1e-14);
                assert!((visibility(&rho) - p).abs() < 1e-14);
            }
        }
        assert!(matches!(
            ghz_fidelity(&noisy_ghz(4, 1.0), 6),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn visibility_matches_dense_observable() {
        use crate::qstate::{expectation, pauli_string, PauliIndex};
        let rho = noisy_ghz(4, 0.6)
            .mix(&crate::optics::pair_state(0.4).density().tensor(&DensityMatrix::maximally_mixed(2)), 0.5)
            .unwrap();
        let dense = expectation(&rho, &pauli_string(&[PauliIndex::X; 4])).unwrap();
        assert!((visibility(&rho) - dense).abs() < 1e-14);
    }

    #[test]
    fn mermin_values() {
        assert!((mermin_threshold(2).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((mermin_threshold(4).unwrap() - 0.353_553_390_593_273_8).abs() < 1e-15);
        for n in 2..12 {
            let r = mermin_threshold(n + 2).unwrap() / mermin_threshold(n).unwrap();
            assert!((r - 0.5).abs() < 1e-15);
        }
        assert!(mermin_threshold(1).is_err());
    }

    #[test]
    fn genuine_entanglement_is_strict() {
        assert!(genuine_entanglement(0.854).unwrap());
        assert!(!genuine_entanglement(0.493).unwrap());
        assert!(!genuine_entanglement(0.5).unwrap());
        assert!(genuine_entanglement(1.2).is_err());
        assert!(genuine_entanglement(f64::NAN).is_err());
    }

    #[test]
    fn zukowski_lookup() {
        let table = ThresholdTable::standard([4, 6]).unwrap();
        assert_eq!(zukowski_threshold(4, &table), None);
        let table = ThresholdTable::from_json(
            r#"{"entries": {"4": {"zukowski_visibility": 0.4123}, "6": {}}}"#,
        )
        .unwrap();
        assert_eq!(zukowski_threshold(4, &table), Some(0.4123));
        assert_eq!(zukowski_threshold(6, &table), None);
        assert_eq!(table.get(6).unwrap().mermin_visibility, mermin_threshold(6).unwrap());
        assert!(ThresholdTable::from_json(r#"{"entries": {"4": {"zukowski_visibility": 1.5}}}"#).is_err());
    }
}
