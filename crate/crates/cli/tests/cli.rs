use std::path::Path;
use std::process::{Command, Output};

use ghz_tomo::optics::{ideal_chi, pair_state};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghz-tomo"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

/// Bare library values, no provenance wrapper.
fn write_ideal_inputs(dir: &Path) {
    std::fs::write(dir.join("psi.json"), serde_json::to_vec(&pair_state(0.0).density()).unwrap()).unwrap();
    std::fs::write(dir.join("ideal_chi.json"), serde_json::to_vec(&ideal_chi()).unwrap()).unwrap();
}

#[test]
fn ideal_twelve_photon_summary() {
    let tmp = tempfile::tempdir().unwrap();
    write_ideal_inputs(tmp.path());
    let out = run(tmp.path(), &["compose", "--pair", "psi.json", "--chi", "ideal_chi.json", "--n", "12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let state = read_json(&tmp.path().join("state_n12.json"));
    assert!((state["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((state["success_probability"].as_f64().unwrap() - 2f64.powi(-5)).abs() < 1e-12);
    // summary only by default at this size
    assert!(state.get("density_matrix").is_none());
    assert_eq!(state["provenance"]["inputs"].as_object().unwrap().len(), 2);
}

#[test]
fn small_states_carry_the_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    write_ideal_inputs(tmp.path());
    let args = ["compose", "--pair", "psi.json", "--chi", "ideal_chi.json", "--n", "4"];
    assert_eq!(run(tmp.path(), &args).status.code(), Some(0));
    assert!(read_json(&tmp.path().join("state_n4.json")).get("density_matrix").is_some());
    let mut summary = args.to_vec();
    summary.push("--summary-only");
    assert_eq!(run(tmp.path(), &summary).status.code(), Some(0));
    assert!(read_json(&tmp.path().join("state_n4.json")).get("density_matrix").is_none());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_ideal_inputs(dir);
    assert_eq!(run(dir, &["simulate", "--white-noise", "0.03", "--seed", "3"]).status.code(), Some(0));

    // outputs are still written when the fit stops early
    let out = run(dir, &["qst", "--data", "pair_experiment.json", "--max-iterations", "1", "--out", "early"]);
    assert_eq!(out.status.code(), Some(1));
    let rho = read_json(&dir.join("early/rho_pair.json"));
    assert_eq!(rho["fit"]["converged"], Value::Bool(false));

    for args in [
        vec!["qst", "--data", "missing.json"],
        vec!["qst", "--data", "psi.json"],
        vec!["compose", "--pair", "psi.json", "--chi", "ideal_chi.json", "--n", "5"],
        vec!["compose", "--pair", "psi.json", "--chi", "ideal_chi.json", "--n", "14"],
        vec!["compose", "--pair", "ideal_chi.json", "--chi", "ideal_chi.json", "--n", "4"],
        vec!["simulate", "--white-noise", "1.5"],
        vec!["report", "--pair", "psi.json", "--chi", "ideal_chi.json", "--thresholds", "psi.json"],
        vec!["frobnicate"],
    ] {
        let out = run(dir, &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn report_with_threshold_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_ideal_inputs(dir);
    std::fs::write(dir.join("thresholds.json"), r#"{"entries":{"4":{"zukowski_visibility":0.3}}}"#).unwrap();
    let out = run(
        dir,
        &["report", "--pair", "psi.json", "--chi", "ideal_chi.json", "--n-max", "6", "--thresholds", "thresholds.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.join("report.json"));
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["zukowski_threshold"].as_f64(), Some(0.3));
    assert_eq!(rows[0]["violates_zukowski"], Value::Bool(true));
    assert!(rows[1]["zukowski_threshold"].is_null());
    assert!(report["provenance"]["inputs"]["thresholds.json"].is_string());
    let table = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains(&table));
}

#[test]
fn simulate_records_a_drawn_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["simulate"]);
    assert_eq!(out.status.code(), Some(0));
    let exp = read_json(&tmp.path().join("pair_experiment.json"));
    assert!(exp["provenance"]["seed"].is_u64());
    assert_eq!(exp["provenance"]["config"]["resolved"]["scheme"], "overcomplete");
}
