//! Forward model: outcome probabilities, Poissonian count records, and the
//! χ-matrix process applied to an adjacent qubit pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::ProcessChi;
use crate::optics::ProjectorSet;
use crate::qstate::local::{left_apply, right_apply_adjoint, AdjacentPair};
use crate::qstate::{pauli_pair, ComplexMatrix, DensityMatrix, Tolerances, ZERO};

/// Counts observed for one setting during one acquisition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub setting: usize,
    pub counts: u64,
    pub time_s: f64,
    pub rate_hz: f64,
}

impl CountRecord {
    /// Expected events per unit outcome probability.
    pub fn exposure(&self) -> f64 {
        self.rate_hz * self.time_s
    }
}

/// Projector set plus count records; the input to every estimator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomoExperiment {
    pub projector_set: ProjectorSet,
    pub records: Vec<CountRecord>,
    pub metadata: String,
}

#[derive(Deserialize)]
struct ExperimentJson {
    projector_set: ProjectorSet,
    records: Vec<CountRecord>,
    #[serde(default)]
    metadata: String,
}

impl<'de> Deserialize<'de> for TomoExperiment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ExperimentJson::deserialize(d)?;
        TomoExperiment::new(raw.projector_set, raw.records, raw.metadata)
            .map_err(serde::de::Error::custom)
    }
}

impl TomoExperiment {
    pub fn new(projector_set: ProjectorSet, records: Vec<CountRecord>, metadata: String) -> Result<Self> {
        let mut seen = vec![false; projector_set.len()];
        for r in &records {
            if r.setting >= projector_set.len() {
                return Err(Error::InvalidArgument(format!(
                    "record refers to setting {} but the set has {}",
                    r.setting,
                    projector_set.len()
                )));
            }
            if !(r.time_s > 0.0 && r.time_s.is_finite() && r.rate_hz > 0.0 && r.rate_hz.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "record for setting {} needs positive time and rate",
                    r.setting
                )));
            }
            seen[r.setting] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "no record for setting {missing}"
            )));
        }
        Ok(Self {
            projector_set,
            records,
            metadata,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.projector_set.n_qubits()
    }

    pub fn total_counts(&self) -> u64 {
        self.records.iter().map(|r| r.counts).sum()
    }

    /// Per-setting `(summed counts, summed exposure)`; repeated acquisitions
    /// of one setting are merged by summation.
    pub fn aggregate(&self) -> (Vec<f64>, Vec<f64>) {
        let mut counts = vec![0.0; self.projector_set.len()];
        let mut exposure = vec![0.0; self.projector_set.len()];
        for r in &self.records {
            counts[r.setting] += r.counts as f64;
            exposure[r.setting] += r.exposure();
        }
        (counts, exposure)
    }

    /// Same experiment with every count replaced through `f(record index, record)`.
    pub fn with_counts(&self, mut f: impl FnMut(usize, &CountRecord) -> u64) -> Self {
        let records = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| CountRecord {
                counts: f(i, r),
                ..r.clone()
            })
            .collect();
        Self {
            projector_set: self.projector_set.clone(),
            records,
            metadata: self.metadata.clone(),
        }
    }

    /// `setting_index,counts,time_s,rate_hz`
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["setting_index", "counts", "time_s", "rate_hz"])?;
        for r in &self.records {
            out.write_record([
                r.setting.to_string(),
                r.counts.to_string(),
                r.time_s.to_string(),
                r.rate_hz.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Born-rule probability `Tr(ρΠ)`, clamped into `[0, 1]` when the excursion
/// is within numerical tolerance.
pub fn outcome_probability(rho: &DensityMatrix, projector: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != projector.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: projector.dim(),
        });
    }
    let p = rho.matrix().trace_product(projector).re;
    let tol = Tolerances::default().psd;
    if p < -tol || p > 1.0 + tol {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0,1]; is the projector rank one?"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Acquisition schedule: every setting integrated for `time_s` at `rate_hz`,
/// the whole sequence repeated `repeats` times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Acquisition {
    pub rate_hz: f64,
    pub time_s: f64,
    pub repeats: usize,
}

impl Acquisition {
    pub fn new(rate_hz: f64, time_s: f64, repeats: usize) -> Result<Self> {
        if !(rate_hz > 0.0 && rate_hz.is_finite() && time_s > 0.0 && time_s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rate ({rate_hz}) and time ({time_s}) must be positive"
            )));
        }
        if repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be ≥ 1".into()));
        }
        Ok(Self {
            rate_hz,
            time_s,
            repeats,
        })
    }
}

/// Draws one Poisson record per setting with mean `rate · time · p_setting`.
///
/// The stream is ChaCha8 seeded from `seed`, so equal seeds give identical experiments.
pub fn simulate_counts(
    rho: &DensityMatrix,
    set: &ProjectorSet,
    rate_hz: f64,
    time_s: f64,
    seed: u64,
) -> Result<TomoExperiment> {
    simulate_acquisition(rho, set, &Acquisition::new(rate_hz, time_s, 1)?, seed)
}

/// Like [`simulate_counts`] with one record per setting and repeat, in
/// acquisition order (repeat-major).
pub fn simulate_acquisition(
    rho: &DensityMatrix,
    set: &ProjectorSet,
    acq: &Acquisition,
    seed: u64,
) -> Result<TomoExperiment> {
    let Acquisition {
        rate_hz,
        time_s,
        repeats,
    } = Acquisition::new(acq.rate_hz, acq.time_s, acq.repeats)?;
    if set.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.n_qubits(),
            found: set.n_qubits(),
        });
    }
    let probabilities = (0..set.len())
        .map(|s| outcome_probability(rho, &set.projector(s)))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(set.len() * repeats);
    for _ in 0..repeats {
        for (s, p) in probabilities.iter().enumerate() {
            records.push(CountRecord {
                setting: s,
                counts: poisson_draw(rate_hz * time_s * p, &mut rng),
                time_s,
                rate_hz,
            });
        }
    }
    TomoExperiment::new(
        set.clone(),
        records,
        format!("simulated: rate_hz={rate_hz} time_s={time_s} repeats={repeats} seed={seed}"),
    )
}

/// Four-photon data behind the fusion: two copies of `rho_pair`, the χ
/// process on photons 2 and 3, post-selection, then Poissonian counts. The
/// rate is the post-selected fourfold rate.
pub fn simulate_fusion_counts(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    set: &ProjectorSet,
    acq: &Acquisition,
    seed: u64,
) -> Result<TomoExperiment> {
    if rho_pair.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_pair.n_qubits(),
        });
    }
    let (out, success) = apply_process(&rho_pair.tensor(rho_pair), chi, (1, 2))?;
    if !(success > 0.0) {
        return Err(Error::InvalidChi(format!("fusion success probability {success}")));
    }
    let rho4 = DensityMatrix::from_unnormalized(&out)?;
    simulate_acquisition(&rho4, set, acq, seed)
}

pub(crate) fn poisson_draw(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// Applies `ρ ↦ Σ_ab χ_ab P_a ρ P_b†` on qubits `(first, second)` (0-based,
/// adjacent) and returns the unnormalized result with its trace, the
/// post-selection success probability.
///
/// Evaluated term by term in the Pauli basis; memory grows as 16 copies of ρ,
/// so large states go through the composer instead.
pub fn apply_process(
    rho: &DensityMatrix,
    chi: &ProcessChi,
    target_pair: (usize, usize),
) -> Result<(ComplexMatrix, f64)> {
    let pair = AdjacentPair::new(target_pair.0, target_pair.1, rho.n_qubits())?;
    let chi_m = chi.matrix();
    let left: Vec<Option<ComplexMatrix>> = (0..16)
        .map(|a| {
            if (0..16).all(|b| chi_m[(a, b)] == ZERO) {
                return Ok(None);
            }
            let mut m = rho.matrix().clone();
            left_apply(&mut m, pair, &pauli_pair(a))?;
            Ok(Some(m))
        })
        .collect::<Result<_>>()?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for b in 0..16 {
        let mut column_sum: Option<ComplexMatrix> = None;
        for (a, la) in left.iter().enumerate() {
            let coeff = chi_m[(a, b)];
            if let (Some(la), true) = (la, coeff != ZERO) {
                match column_sum.as_mut() {
                    Some(acc) => acc.add_scaled(la, coeff),
                    None => column_sum = Some(la.scale(coeff)),
                }
            }
        }
        if let Some(mut term) = column_sum {
            right_apply_adjoint(&mut term, pair, &pauli_pair(b))?;
            out.add_scaled(&term, crate::qstate::ONE);
        }
    }
    let success = out.trace().re;
    Ok((out, success))
}
