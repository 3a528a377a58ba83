use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use qrboot::bootstrap::{bootstrap_law_of_estimator, resample_indices, write_index_trace, BootstrapScheme, SchemeKind};
use qrboot::estimators::{EstimatorRegistry, EstimatorSpec};
use qrboot::io::{fmt9, parse_measure_csv, parse_path_csv, write_measure_csv, write_path_csv};
use qrboot::measures::{BoxSpace, DiscreteMeasure, Point};
use qrboot::prob_metrics::metric_relations;
use qrboot::processes::{
    alpha_bound, generate as generate_path, limit_law, mixing_diagnostics, varadarajan_diagnostic, AlphaBound,
    MixingDiagnostics, ProcessKind, ProcessSpec, DEFAULT_RESOLUTION,
};
use qrboot::rng::derive;
use qrboot::robustness::{run_experiment, ExperimentConfig};

use crate::error::{CliError, CliResult};
use crate::manifest::{manifest_path_for, RunManifest};
use crate::{AlphaArgs, BootstrapArgs, ExperimentArgs, GenerateArgs, MetricArgs, SchemeArg, VaradarajanArgs};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn config_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Config {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

/// Capacity errors keep their own exit code; anything else is blamed on
/// the config.
fn setup_error(path: &Path, e: qrboot::Error) -> CliError {
    if e.is_capacity() {
        CliError::Core(e)
    } else {
        config_error(path, e)
    }
}

/// Parses a TOML config into `T`.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<(T, String)> {
    let text = read(path)?;
    let value = toml::from_str(&text).map_err(|e| config_error(path, e))?;
    Ok((value, text))
}

fn load_process(path: &Path) -> CliResult<(ProcessSpec, String)> {
    let (spec, text): (ProcessSpec, String) = load_config(path)?;
    spec.validate().map_err(|e| config_error(path, e))?;
    Ok((spec, text))
}

fn load_measure(path: &Path) -> CliResult<DiscreteMeasure<Point>> {
    parse_measure_csv(&read(path)?).map_err(|e| match e {
        qrboot::Error::Parse { line, message } => config_error(path, format!("line {line}: {message}")),
        other => config_error(path, other),
    })
}

/// Writes `body` to `out` with a manifest next to it, or prints it.
fn emit(body: &str, out: Option<&Path>, mut manifest: RunManifest) -> CliResult<()> {
    match out {
        Some(p) => {
            manifest.write_output(p, body)?;
            manifest.finish(&manifest_path_for(p))?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}

pub fn metric(a: &MetricArgs, out: Option<&Path>) -> CliResult<()> {
    let p = load_measure(&a.p)?;
    let q = load_measure(&a.q)?;
    let dim = p.support()[0].dim();
    if q.support()[0].dim() != dim {
        return Err(config_error(&a.q, format!("dimension differs from {}", a.p.display())));
    }
    let (lo, hi) = p
        .support()
        .iter()
        .chain(q.support())
        .flat_map(|x| x.coords().iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    let space = BoxSpace::new(lo, hi.max(lo + 1.0), dim);
    let r = metric_relations(&p, &q, &space)?;
    let sqrt_flag = if r.sqrt_bound_checked {
        r.prohorov_below_sqrt_bl.to_string()
    } else {
        format!("{} (not required)", r.prohorov_below_sqrt_bl)
    };
    let body = format!(
        "d_bl {}\nprohorov {}\nsqrt_d_bl {}\nbl_below_two_prohorov {}\nprohorov_below_sqrt_bl {}\n",
        fmt9(r.bl),
        fmt9(r.prohorov),
        fmt9(r.sqrt_bl),
        r.bl_below_two_prohorov,
        sqrt_flag
    );
    emit(&body, out, RunManifest::start("metric", None, 0))
}

pub fn generate(a: &GenerateArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let (spec, text) = load_process(&a.config)?;
    let manifest = RunManifest::start("generate", Some((&a.config, text.as_bytes())), seed);
    let path = generate_path(&spec, a.n, seed).map_err(|e| config_error(&a.config, e))?;
    emit(&write_path_csv(&path), out, manifest)
}

pub fn bootstrap(a: &BootstrapArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let path = parse_path_csv(&read(&a.path)?, &a.path.display().to_string()).map_err(|e| config_error(&a.path, e))?;
    let scheme = BootstrapScheme {
        kind: match a.scheme {
            SchemeArg::Efron => SchemeKind::Efron,
            SchemeArg::MovingBlock => SchemeKind::MovingBlock,
        },
        block_exponent: a.exponent,
        resample_size: a.resample_size,
        circular: !a.non_circular,
        extended_schedule: a.extended,
    };
    scheme.validate()?;
    if a.reps == 0 {
        return Err(config_error(Path::new("--reps"), "at least one resample is needed"));
    }
    let manifest = RunManifest::start("bootstrap", Some((&a.path, read(&a.path)?.as_bytes())), seed);
    if let Some(t) = &a.trace {
        let mut buf = Vec::new();
        for r in 0..a.reps {
            let idx = resample_indices(path.len(), &scheme, derive(seed, r as u64))?;
            write_index_trace(&mut buf, r, &idx, r == 0).expect("writing to memory");
        }
        std::fs::write(t, buf).map_err(|e| CliError::io(t, e))?;
    }
    let body = match &a.estimator {
        Some(name) => {
            let spec = EstimatorSpec {
                name: name.clone(),
                beta: a.beta,
                k: a.k,
            };
            let est = EstimatorRegistry::default().build(&spec)?;
            let law = bootstrap_law_of_estimator(&path, &scheme, est.as_ref(), a.reps, seed)?;
            write_measure_csv(&law.map(|x| Point::scalar(*x)))
        }
        None => {
            if a.reps != 1 {
                return Err(config_error(Path::new("--reps"), "several resamples need --estimator"));
            }
            let idx = resample_indices(path.len(), &scheme, derive(seed, 0))?;
            let values = idx.iter().map(|&i| path.values()[i]).collect();
            write_path_csv(&path.with_values(values, "resample", seed)?)
        }
    };
    emit(&body, out, manifest)
}

#[derive(Serialize)]
struct AlphaReport {
    process: String,
    bound: AlphaBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<MixingDiagnostics>,
}

pub fn alpha(a: &AlphaArgs, out: Option<&Path>) -> CliResult<()> {
    let (spec, text) = load_process(&a.config)?;
    let manifest = RunManifest::start("alpha", Some((&a.config, text.as_bytes())), 0);
    let diagnostics = match spec.kind {
        ProcessKind::MarkovChain { .. } => Some(mixing_diagnostics(&spec, a.max_lag, &a.n_grid)?),
        _ => None,
    };
    if out.is_some() {
        if let Some(d) = &diagnostics {
            for (lag, v) in d.alpha_coeffs.iter().enumerate() {
                println!("alpha({}) {}", lag + 1, fmt9(*v));
            }
        }
    }
    let report = AlphaReport {
        process: spec.origin(),
        bound: alpha_bound(&spec),
        diagnostics,
    };
    emit(&json(&report), out, manifest)
}

pub fn varadarajan(a: &VaradarajanArgs, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let (spec, text) = load_process(&a.config)?;
    let manifest = RunManifest::start("varadarajan", Some((&a.config, text.as_bytes())), seed);
    let target = match &a.target {
        Some(t) => load_measure(t)?,
        None => limit_law(&spec, DEFAULT_RESOLUTION)?.measure,
    };
    let rows = varadarajan_diagnostic(&spec, &target, &a.n_grid, a.reps, seed)?;
    let mut body = String::from("n,median,min,max\n");
    for r in &rows {
        let _ = writeln!(body, "{},{},{},{}", r.n, fmt9(r.median), fmt9(r.min), fmt9(r.max));
    }
    emit(&body, out, manifest)
}

pub fn experiment(a: &ExperimentArgs, seed: Option<u64>, out: Option<&Path>) -> CliResult<()> {
    let (mut config, text): (ExperimentConfig, String) = load_config(&a.config)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate().map_err(|e| setup_error(&a.config, e))?;
    let mut manifest = RunManifest::start("experiment", Some((&a.config, text.as_bytes())), config.seed);
    let dir = out.ok_or_else(|| config_error(&a.config, "experiment needs --out <directory>"))?;
    let report = run_experiment(&config).map_err(|e| setup_error(&a.config, e))?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    manifest.write_output(&dir.join("report.json"), &(report.to_json() + "\n"))?;
    manifest.write_output(&dir.join("summary.csv"), &report.to_csv())?;
    manifest.finish(&dir.join("manifest.json"))?;
    let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), fmt9);
    println!("{:>8} {:>12} {:>12} {:>12}", "n", "input_proxy", "nested", "coupled");
    for r in &report.records {
        println!("{:>8} {:>12} {:>12} {:>12}", r.n, show(r.input_proxy), show(r.nested), show(r.coupled));
        for f in &r.failures {
            eprintln!("n = {}: {f}", r.n);
        }
    }
    if report.any_succeeded() {
        Ok(())
    } else {
        Err(CliError::AllFailed)
    }
}
