use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::thresholds::{
    genuine_entanglement, ghz_fidelity, visibility, zukowski_threshold, ThresholdTable,
};
use crate::composer::{compose_series, ComposerConfig, Composed};
use crate::error::{Error, Result};
use crate::estimation::ProcessChi;
use crate::qstate::DensityMatrix;

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Where a report came from: input hashes, seed and configuration echo.
/// Contains no timestamps so that reruns are byte-identical.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    /// Input name (file path or logical name) to SHA-256.
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            tool: format!("ghz-tomo {}", env!("CARGO_PKG_VERSION")),
            inputs: BTreeMap::new(),
            seed: None,
            config,
        }
    }

    pub fn add_input(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.inputs.insert(name.into(), sha256_hex(bytes));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_error: Option<f64>,
    pub visibility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visibility_error: Option<f64>,
    pub success_probability: f64,
    pub mermin_threshold: f64,
    pub zukowski_threshold: Option<f64>,
    pub genuine_entanglement: bool,
    pub violates_mermin: bool,
    pub violates_zukowski: Option<bool>,
}

impl ReportRow {
    fn from_values(
        n: usize,
        fidelity: f64,
        visibility: f64,
        success_probability: f64,
        thresholds: &ThresholdTable,
    ) -> Result<Self> {
        let entry = thresholds.get(n).ok_or_else(|| {
            Error::InvalidArgument(format!("threshold table has no entry for n = {n}"))
        })?;
        let zukowski = zukowski_threshold(n, thresholds);
        // rounding can push an ideal fidelity a hair above 1
        let genuine = genuine_entanglement(fidelity.clamp(0.0, 1.0))?
            && fidelity > entry.genuine_entanglement_fidelity;
        Ok(Self {
            n,
            fidelity,
            fidelity_error: None,
            visibility,
            visibility_error: None,
            success_probability,
            mermin_threshold: entry.mermin_visibility,
            zukowski_threshold: zukowski,
            genuine_entanglement: genuine,
            violates_mermin: visibility > entry.mermin_visibility,
            violates_zukowski: zukowski.map(|z| visibility > z),
        })
    }

    pub(crate) fn from_state(c: &Composed, thresholds: &ThresholdTable) -> Result<Self> {
        Self::from_values(
            c.n_photons,
            ghz_fidelity(&c.state, c.n_photons)?,
            visibility(&c.state),
            c.success_probability,
            thresholds,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub samples: usize,
    pub failed: usize,
    pub seed: u64,
}

/// Per-N fidelity, visibility and threshold flags. Error fields are filled
/// only by the bootstrap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
    pub provenance: Provenance,
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text table; absent thresholds and errors render as `n/a`.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3}  {:>9}  {:>8}  {:>10}  {:>8}  {:>10}  {:>8}  {:>8}  {:>9}  {:>7}  {:>8}",
            "n",
            "fidelity",
            "±",
            "visibility",
            "±",
            "p_success",
            "mermin",
            "zukowski",
            "entangled",
            "¬mermin",
            "¬zukowski"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>3}  {:>9.6}  {:>8}  {:>10.6}  {:>8}  {:>10.4e}  {:>8.6}  {:>8}  {:>9}  {:>7}  {:>8}",
                r.n,
                r.fidelity,
                fmt_opt(r.fidelity_error, 6),
                r.visibility,
                fmt_opt(r.visibility_error, 6),
                r.success_probability,
                r.mermin_threshold,
                fmt_opt(r.zukowski_threshold, 6),
                yes_no(r.genuine_entanglement),
                yes_no(r.violates_mermin),
                r.violates_zukowski.map_or("n/a", yes_no),
            );
        }
        out
    }
}

/// Input hashes over the canonical JSON of the pair state and χ.
pub fn input_provenance(rho_pair: &DensityMatrix, chi: &ProcessChi, config: serde_json::Value) -> Result<Provenance> {
    let mut p = Provenance::new(config);
    p.add_input("rho_pair", serde_json::to_string(rho_pair)?.as_bytes());
    p.add_input("chi", serde_json::to_string(chi)?.as_bytes());
    Ok(p)
}

pub(crate) fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < 4 || n_max % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be even and ≥ 4, got {n_max}"
        )));
    }
    Ok(())
}

/// Rows for n = 4, 6, …, `n_max` from one composition pass.
pub fn full_report(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    n_max: usize,
    thresholds: &ThresholdTable,
) -> Result<AnalysisReport> {
    full_report_with(rho_pair, chi, n_max, thresholds, &ComposerConfig::default())
}

pub fn full_report_with(
    rho_pair: &DensityMatrix,
    chi: &ProcessChi,
    n_max: usize,
    thresholds: &ThresholdTable,
    cfg: &ComposerConfig,
) -> Result<AnalysisReport> {
    check_n_max(n_max)?;
    let thresholds = thresholds.clone().covering((4..=n_max).step_by(2))?;
    let mut rows = Vec::new();
    compose_series(rho_pair, chi, n_max, cfg, |c| {
        rows.push(ReportRow::from_state(c, &thresholds)?);
        Ok(())
    })?;
    let config = serde_json::json!({
        "n_max": n_max,
        "composer": cfg,
        "thresholds": thresholds,
    });
    Ok(AnalysisReport {
        rows,
        bootstrap: None,
        provenance: input_provenance(rho_pair, chi, config)?,
    })
}
