use std::fs;
use std::path::Path;

use ghz_tomo::analysis::{
    bootstrap_pipeline, full_report, ghz_fidelity, visibility, AnalysisReport, BootstrapConfig,
    Provenance, ThresholdTable,
};
use ghz_tomo::composer::{compose_ghz_with, ComposerConfig};
use ghz_tomo::estimation::{mle_aapt, mle_qst, success_probability_ideal};
use ghz_tomo::optics::{ideal_chi, pair_state, standard_projector_set, Scheme};
use ghz_tomo::qstate::{fidelity_with_pure, DensityMatrix};
use ghz_tomo::simulator::{simulate_acquisition, simulate_fusion_counts, Acquisition, TomoExperiment};
use serde::Serialize;
use serde_json::json;

use crate::artifacts::{
    write_json, write_text, ChiArtifact, ExperimentArtifact, FitSummary, Input, PairArtifact,
    StateArtifact,
};
use crate::{
    AaptArgs, BootstrapArgs, CliError, ComposeArgs, QstArgs, ReportArgs, SimulateArgs,
};

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(dir, e))
}

fn provenance<A: Serialize>(command: &str, args: &A, inputs: &[&Input]) -> Provenance {
    let mut p = Provenance::new(json!({ "command": command, "args": args }));
    for input in inputs {
        p.add_input(input.name(), &input.bytes);
    }
    p
}

fn unit_interval(name: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::Input(format!("--{name} must lie in [0, 1], got {v}")))
    }
}

fn summarize_experiment(path: &Path, exp: &TomoExperiment) {
    let (counts, _) = exp.aggregate();
    let settings = counts.len();
    println!(
        "wrote {}: {} settings, {} records, {} counts ({:.1} per setting)",
        path.display(),
        settings,
        exp.records.len(),
        exp.total_counts(),
        exp.total_counts() as f64 / settings as f64
    );
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    prepare_out(&a.out)?;
    let seed = a.seed.unwrap_or_else(rand::random);
    let white = unit_interval("white-noise", a.white_noise)?;
    let eps = unit_interval("fusion-noise", a.fusion_noise)?;
    let (default_rate, default_scheme, n_qubits) = if a.four_photon {
        (8.5, Scheme::Minimal, 4)
    } else {
        (40_000.0, Scheme::Overcomplete, 2)
    };
    let rate = a.rate.unwrap_or(default_rate);
    let scheme = a.scheme.map(Scheme::from).unwrap_or(default_scheme);
    let acq = Acquisition::new(rate, a.time, a.repeats)?;
    let set = standard_projector_set(n_qubits, scheme)?;

    let psi = pair_state(a.phi);
    let pair = psi.density().mix(&DensityMatrix::maximally_mixed(2), 1.0 - white)?;
    let mut prov = Provenance::new(json!({
        "command": "simulate",
        "args": a,
        "resolved": { "rate_hz": rate, "scheme": scheme, "seed": seed },
    }));
    prov.seed = Some(seed);

    let truth_path = a.out.join("pair_truth.json");
    write_json(
        &truth_path,
        &PairArtifact {
            provenance: prov.clone(),
            fit: None,
            fidelity_psi_plus: fidelity_with_pure(&pair, &pair_state(0.0))?,
            density_matrix: pair.clone(),
        },
    )?;
    println!("wrote {}", truth_path.display());

    let (exp, exp_path) = if a.four_photon {
        let chi = ideal_chi().depolarized(eps)?;
        let chi_path = a.out.join("chi_truth.json");
        write_json(
            &chi_path,
            &ChiArtifact {
                provenance: prov.clone(),
                fit: None,
                success_probability_ideal: success_probability_ideal(&chi)?,
                chi: chi.clone(),
            },
        )?;
        println!("wrote {}", chi_path.display());
        (
            simulate_fusion_counts(&pair, &chi, &set, &acq, seed)?,
            a.out.join("four_photon_experiment.json"),
        )
    } else {
        (
            simulate_acquisition(&pair, &set, &acq, seed)?,
            a.out.join("pair_experiment.json"),
        )
    };
    write_json(
        &exp_path,
        &ExperimentArtifact {
            provenance: prov,
            experiment: exp.clone(),
        },
    )?;
    summarize_experiment(&exp_path, &exp);
    println!("seed: {seed}");
    Ok(())
}

fn not_converged(what: &str, fit: &FitSummary) -> CliError {
    CliError::NotConverged(format!(
        "{what} did not converge after {} iterations (gradient norm {:e})",
        fit.iterations, fit.gradient_norm
    ))
}

pub fn qst(a: &QstArgs) -> Result<(), CliError> {
    let data = Input::read(&a.data)?;
    prepare_out(&a.out)?;
    let exp = data.experiment()?;
    let res = mle_qst(&exp, &a.fit.config())?;
    let fit = FitSummary::of(&res);
    let fidelity = fidelity_with_pure(&res.estimate, &pair_state(0.0))?;
    let path = a.out.join("rho_pair.json");
    write_json(
        &path,
        &PairArtifact {
            provenance: provenance("qst", a, &[&data]),
            fit: Some(fit.clone()),
            fidelity_psi_plus: fidelity,
            density_matrix: res.estimate,
        },
    )?;
    println!("wrote {}", path.display());
    println!("fidelity with psi+: {fidelity:.6}");
    println!("converged: {} ({} iterations)", fit.converged, fit.iterations);
    if !fit.converged {
        return Err(not_converged("pair MLE", &fit));
    }
    Ok(())
}

pub fn aapt(a: &AaptArgs) -> Result<(), CliError> {
    let pair_in = Input::read(&a.pair)?;
    let data = Input::read(&a.data)?;
    prepare_out(&a.out)?;
    let pair = pair_in.pair()?;
    let exp = data.experiment()?;
    let res = mle_aapt(&pair, &exp, &a.fit.config())?;
    let fit = FitSummary::of(&res);
    let success = success_probability_ideal(&res.estimate)?;
    let path = a.out.join("chi.json");
    write_json(
        &path,
        &ChiArtifact {
            provenance: provenance("aapt", a, &[&pair_in, &data]),
            fit: Some(fit.clone()),
            success_probability_ideal: success,
            chi: res.estimate,
        },
    )?;
    println!("wrote {}", path.display());
    println!("success probability on ideal pairs: {success:.6}");
    println!("converged: {} ({} iterations)", fit.converged, fit.iterations);
    if !fit.converged {
        return Err(not_converged("process MLE", &fit));
    }
    Ok(())
}

/// Density matrices are written in full below this photon number unless asked otherwise.
const SUMMARY_ONLY_FROM: usize = 10;

pub fn compose(a: &ComposeArgs) -> Result<(), CliError> {
    let pair_in = Input::read(&a.pair)?;
    let chi_in = Input::read(&a.chi)?;
    prepare_out(&a.out)?;
    let pair = pair_in.pair()?;
    let chi = chi_in.chi()?;
    let (rho, success) = compose_ghz_with(&pair, &chi, a.n, &ComposerConfig::default())?;
    let fidelity = ghz_fidelity(&rho, a.n)?;
    let vis = visibility(&rho);
    let summary_only = a.summary_only || (a.n >= SUMMARY_ONLY_FROM && !a.full_matrix);
    let path = a.out.join(format!("state_n{}.json", a.n));
    write_json(
        &path,
        &StateArtifact {
            provenance: provenance("compose", a, &[&pair_in, &chi_in]),
            n: a.n,
            success_probability: success,
            fidelity,
            visibility: vis,
            density_matrix: (!summary_only).then_some(rho),
        },
    )?;
    println!("wrote {}", path.display());
    println!("n: {}", a.n);
    println!("fidelity: {fidelity:.12}");
    println!("visibility: {vis:.12}");
    println!("success probability: {success:.12} (log2 {:.6})", success.log2());
    Ok(())
}

fn thresholds(path: &Option<std::path::PathBuf>) -> Result<(ThresholdTable, Option<Input>), CliError> {
    match path {
        Some(p) => {
            let input = Input::read(p)?;
            let text = String::from_utf8(input.bytes.clone()).map_err(|e| CliError::input(p, e))?;
            let table = ThresholdTable::from_json(&text).map_err(|e| CliError::input(p, e))?;
            Ok((table, Some(input)))
        }
        None => Ok((ThresholdTable::default(), None)),
    }
}

fn write_report(
    report: &AnalysisReport,
    out: &Path,
    stem: &str,
) -> Result<(), CliError> {
    let json_path = out.join(format!("{stem}.json"));
    let text_path = out.join(format!("{stem}.txt"));
    write_json(&json_path, report)?;
    let table = report.to_text_table();
    write_text(&text_path, &table)?;
    println!("wrote {} and {}", json_path.display(), text_path.display());
    print!("{table}");
    Ok(())
}

/// Replaces the library provenance with file hashes and the argument echo,
/// keeping the library's own configuration block.
fn cli_provenance<A: Serialize>(
    report: &mut AnalysisReport,
    command: &str,
    args: &A,
    inputs: &[&Input],
) {
    let library = std::mem::take(&mut report.provenance);
    let mut p = provenance(command, args, inputs);
    p.config = json!({ "command": command, "args": args, "library": library.config });
    for (name, hash) in library.inputs {
        p.inputs.insert(format!("canonical:{name}"), hash);
    }
    p.seed = library.seed;
    report.provenance = p;
}

pub fn report(a: &ReportArgs) -> Result<(), CliError> {
    let pair_in = Input::read(&a.pair)?;
    let chi_in = Input::read(&a.chi)?;
    let (table, table_in) = thresholds(&a.thresholds)?;
    prepare_out(&a.out)?;
    let pair = pair_in.pair()?;
    let chi = chi_in.chi()?;
    let mut report = full_report(&pair, &chi, a.n_max, &table)?;
    let mut inputs = vec![&pair_in, &chi_in];
    inputs.extend(table_in.as_ref());
    cli_provenance(&mut report, "report", a, &inputs);
    write_report(&report, &a.out, "report")
}

pub fn bootstrap(a: &BootstrapArgs) -> Result<(), CliError> {
    let pair_data = Input::read(&a.pair_data)?;
    let data = Input::read(&a.data)?;
    let (table, table_in) = thresholds(&a.thresholds)?;
    prepare_out(&a.out)?;
    let exp_pair = pair_data.experiment()?;
    let exp4 = data.experiment()?;
    if a.n_max < 4 || a.n_max % 2 != 0 {
        return Err(CliError::Input(format!("--n-max must be even and ≥ 4, got {}", a.n_max)));
    }
    let cfg = BootstrapConfig {
        samples: a.samples,
        seed: a.seed.unwrap_or_else(rand::random),
        resample_pair: a.resample_pair,
        mle: a.fit.config(),
        ..BootstrapConfig::default()
    };
    let n_list: Vec<usize> = (4..=a.n_max).step_by(2).collect();
    let mut outcome = match bootstrap_pipeline(&exp_pair, &exp4, &cfg, &n_list, &table) {
        Err(e @ ghz_tomo::Error::BootstrapFailures { .. }) => {
            return Err(CliError::NotConverged(e.to_string()))
        }
        other => other?,
    };
    let mut inputs = vec![&pair_data, &data];
    inputs.extend(table_in.as_ref());
    cli_provenance(&mut outcome.report, "bootstrap", a, &inputs);

    let csv_path = a.out.join("bootstrap_samples.csv");
    let file = fs::File::create(&csv_path).map_err(|e| CliError::input(&csv_path, e))?;
    outcome.write_samples_csv(file)?;
    println!("wrote {}", csv_path.display());
    write_report(&outcome.report, &a.out, "bootstrap_report")?;
    let fits_converged = ["pair_fit", "chi_fit"].iter().all(|k| {
        outcome.report.provenance.config["library"][k]["converged"]
            .as_bool()
            .unwrap_or(false)
    });
    if !fits_converged {
        return Err(CliError::NotConverged(
            "point-estimate fit did not converge; see provenance.config".into(),
        ));
    }
    Ok(())
}
