//! Fidelity, visibility, entanglement and local-realism thresholds, reports
//! and bootstrap error bars.

mod bootstrap;
mod report;
mod thresholds;

pub use bootstrap::{
    bootstrap_pipeline, sample_means, BootstrapConfig, BootstrapOutcome, SampleValues,
};
pub use report::{
    full_report, full_report_with, input_provenance, sha256_hex, AnalysisReport,
    BootstrapSummary, Provenance, ReportRow,
};
pub use thresholds::{
    genuine_entanglement, ghz_fidelity, mermin_threshold, visibility, zukowski_threshold,
    ThresholdEntry, ThresholdTable, GENUINE_ENTANGLEMENT_FIDELITY,
};
