//! Parametric bootstrap: every four-photon count is redrawn from a Poisson
//! distribution around its observed value, χ is re-estimated against the
//! fixed pair matrix, and the spread of the derived quantities is the error.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{check_n_max, input_provenance, AnalysisReport, BootstrapSummary, ReportRow};
use super::thresholds::ThresholdTable;
use crate::composer::{compose_series, ComposerConfig};
use crate::error::{Error, Result};
use crate::estimation::{mle_aapt, mle_qst, MleConfig, ProcessChi};
use crate::qstate::DensityMatrix;
use crate::simulator::{poisson_draw, TomoExperiment};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub samples: usize,
    pub seed: u64,
    /// Also redraw the pair counts and refit the pair matrix. Off by default:
    /// pair errors are neglected next to the four-photon statistics.
    pub resample_pair: bool,
    /// Abort when more than this fraction of samples fails to converge.
    pub max_failure_fraction: f64,
    pub mle: MleConfig,
    pub composer: ComposerConfig,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
            resample_pair: false,
            max_failure_fraction: 0.1,
            mle: MleConfig::default(),
            composer: ComposerConfig::default(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "bootstrap needs at least 2 samples, got {}",
                self.samples
            )));
        }
        if !(0.0..=1.0).contains(&self.max_failure_fraction) {
            return Err(Error::InvalidArgument(format!(
                "failure fraction {} outside [0, 1]",
                self.max_failure_fraction
            )));
        }
        self.mle.validate()
    }
}

/// Derived values of one resample, one entry per requested n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleValues {
    pub index: usize,
    pub fidelity: Vec<f64>,
    pub visibility: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapOutcome {
    pub report: AnalysisReport,
    pub n_list: Vec<usize>,
    /// Successful samples in index order.
    pub samples: Vec<SampleValues>,
}

impl BootstrapOutcome {
    /// Long-format CSV: `sample,n,fidelity,visibility`.
    pub fn write_samples_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["sample", "n", "fidelity", "visibility"])?;
        for s in &self.samples {
            for (k, n) in self.n_list.iter().enumerate() {
                wtr.write_record([
                    s.index.to_string(),
                    n.to_string(),
                    format!("{:?}", s.fidelity[k]),
                    format!("{:?}", s.visibility[k]),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

fn check_n_list(n_list: &[usize]) -> Result<Vec<usize>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty photon-number list".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        check_n_max(n)?;
    }
    Ok(ns)
}

/// Fidelity and visibility for every n in `ns` (sorted) from one composition pass.
fn derived(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    ns: &[usize],
    thresholds: &ThresholdTable,
    cfg: &ComposerConfig,
) -> Result<Vec<ReportRow>> {
    let n_max = *ns.last().expect("non-empty");
    let mut rows = Vec::with_capacity(ns.len());
    compose_series(rho_pair, chi, n_max, cfg, |c| {
        if ns.contains(&c.n_photons) {
            rows.push(ReportRow::from_state(c, thresholds)?);
        }
        Ok(())
    })?;
    Ok(rows)
}

fn resample(exp: &TomoExperiment, rng: &mut ChaCha8Rng) -> TomoExperiment {
    exp.with_counts(|_, rec| poisson_draw(rec.counts as f64, rng))
}

fn one_sample(
    index: usize,
    exp_pair: &TomoExperiment,
    exp4: &TomoExperiment,
    rho_pair: &DensityMatrix,
    ns: &[usize],
    thresholds: &ThresholdTable,
    cfg: &BootstrapConfig,
) -> Result<Option<SampleValues>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let pair = if cfg.resample_pair {
        let fit = mle_qst(&resample(exp_pair, &mut rng), &cfg.mle)?;
        if !fit.converged {
            return Ok(None);
        }
        fit.estimate
    } else {
        rho_pair.clone()
    };
    let fit = match mle_aapt(&pair, &resample(exp4, &mut rng), &cfg.mle) {
        Ok(fit) => fit,
        // a resample can lose all counts or lose identifiability; count it as a failure
        Err(Error::EmptyData | Error::RankDeficient { .. } | Error::InvalidChi(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !fit.converged {
        return Ok(None);
    }
    let rows = derived(&pair, &fit.estimate, ns, thresholds, &cfg.composer)?;
    Ok(Some(SampleValues {
        index,
        fidelity: rows.iter().map(|r| r.fidelity).collect(),
        visibility: rows.iter().map(|r| r.visibility).collect(),
    }))
}

fn run_samples(
    f: impl Fn(usize) -> Result<Option<SampleValues>> + Sync + Send,
    samples: usize,
) -> Vec<Result<Option<SampleValues>>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..samples).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..samples).map(f).collect()
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Point estimates from the full data plus bootstrap standard deviations.
///
/// The pair matrix comes from `mle_qst(exp_pair)` and is held fixed unless
/// `cfg.resample_pair` is set. Rows carry the point estimates; the error
/// fields are sample standard deviations over the converged resamples.
pub fn bootstrap_pipeline(
    exp_pair: &TomoExperiment,
    exp4: &TomoExperiment,
    cfg: &BootstrapConfig,
    n_list: &[usize],
    thresholds: &ThresholdTable,
) -> Result<BootstrapOutcome> {
    cfg.validate()?;
    let ns = check_n_list(n_list)?;
    let thresholds = thresholds.clone().covering(ns.iter().copied())?;

    let pair_fit = mle_qst(exp_pair, &cfg.mle)?;
    let chi_fit = mle_aapt(&pair_fit.estimate, exp4, &cfg.mle)?;
    let mut rows = derived(&pair_fit.estimate, &chi_fit.estimate, &ns, &thresholds, &cfg.composer)?;

    let rho_pair = &pair_fit.estimate;
    let results = run_samples(
        |i| one_sample(i, exp_pair, exp4, rho_pair, &ns, &thresholds, cfg),
        cfg.samples,
    );
    let mut samples = Vec::with_capacity(cfg.samples);
    for r in results {
        if let Some(s) = r? {
            samples.push(s);
        }
    }
    let failed = cfg.samples - samples.len();
    if failed as f64 > cfg.max_failure_fraction * cfg.samples as f64 || samples.len() < 2 {
        return Err(Error::BootstrapFailures {
            failed,
            total: cfg.samples,
        });
    }
    for (k, row) in rows.iter_mut().enumerate() {
        row.fidelity_error = Some(mean_std(samples.iter().map(|s| s.fidelity[k])).1);
        row.visibility_error = Some(mean_std(samples.iter().map(|s| s.visibility[k])).1);
    }

    let config = serde_json::json!({
        "n_list": ns,
        "bootstrap": cfg,
        "thresholds": thresholds,
        "pair_fit": {"converged": pair_fit.converged, "iterations": pair_fit.iterations},
        "chi_fit": {"converged": chi_fit.converged, "iterations": chi_fit.iterations},
    });
    let mut provenance = input_provenance(rho_pair, &chi_fit.estimate, config)?;
    let mut pair_csv = Vec::new();
    exp_pair.write_csv(&mut pair_csv)?;
    provenance.add_input("pair_counts", &pair_csv);
    let mut four_csv = Vec::new();
    exp4.write_csv(&mut four_csv)?;
    provenance.add_input("four_photon_counts", &four_csv);
    provenance.seed = Some(cfg.seed);

    Ok(BootstrapOutcome {
        report: AnalysisReport {
            rows,
            bootstrap: Some(BootstrapSummary {
                samples: cfg.samples,
                failed,
                seed: cfg.seed,
            }),
            provenance,
        },
        n_list: ns,
        samples,
    })
}

/// Per-n means over the bootstrap samples, `(fidelity, visibility)`.
pub fn sample_means(outcome: &BootstrapOutcome) -> Vec<(f64, f64)> {
    (0..outcome.n_list.len())
        .map(|k| {
            (
                mean_std(outcome.samples.iter().map(|s| s.fidelity[k])).0,
                mean_std(outcome.samples.iter().map(|s| s.visibility[k])).0,
            )
        })
        .collect()
}
