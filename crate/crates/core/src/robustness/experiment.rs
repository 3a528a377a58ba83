use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::distance::paired_estimate;
use super::input::input_distance_proxy;
use super::law::law_of_laws;
use crate::estimators::EstimatorRegistry;
use crate::rng::derive;
use crate::{Error, Result};

/// Results for one path length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NRecord {
    pub n: usize,
    /// Master seed of this cell; outer replicate `k` uses `derive(seed, k)`.
    pub seed: u64,
    pub input_proxy: Option<f64>,
    pub input_resolution: Option<f64>,
    pub input_joint: Option<f64>,
    pub nested: Option<f64>,
    pub coupled: Option<f64>,
    pub err_nested: Option<f64>,
    pub err_coupled: Option<f64>,
    pub binning_resolution: Option<f64>,
    pub runtime_ms: u64,
    /// One message per failed stage, prefixed by the stage name.
    pub failures: Vec<String>,
}

impl NRecord {
    fn empty(n: usize, seed: u64) -> Self {
        NRecord {
            n,
            seed,
            input_proxy: None,
            input_resolution: None,
            input_joint: None,
            nested: None,
            coupled: None,
            err_nested: None,
            err_coupled: None,
            binning_resolution: None,
            runtime_ms: 0,
            failures: Vec::new(),
        }
    }

    /// True when the output distances were computed.
    pub fn succeeded(&self) -> bool {
        self.nested.is_some() || self.coupled.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub records: Vec<NRecord>,
}

impl RobustnessReport {
    pub fn any_succeeded(&self) -> bool {
        self.records.iter().any(NRecord::succeeded)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// One row per `n`; absent values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(SUMMARY_HEADER);
        s.push('\n');
        for r in &self.records {
            let row = SummaryRow::from(r);
            let _ = writeln!(s, "{}", row.to_csv());
        }
        s
    }
}

pub const SUMMARY_HEADER: &str = "n,input_proxy,nested,coupled,err_nested,err_coupled,runtime_ms";

/// A parsed row of the summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub input_proxy: Option<f64>,
    pub nested: Option<f64>,
    pub coupled: Option<f64>,
    pub err_nested: Option<f64>,
    pub err_coupled: Option<f64>,
    pub runtime_ms: u64,
}

impl From<&NRecord> for SummaryRow {
    fn from(r: &NRecord) -> Self {
        SummaryRow {
            n: r.n,
            input_proxy: r.input_proxy,
            nested: r.nested,
            coupled: r.coupled,
            err_nested: r.err_nested,
            err_coupled: r.err_coupled,
            runtime_ms: r.runtime_ms,
        }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9}")).unwrap_or_default()
}

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            cell(self.input_proxy),
            cell(self.nested),
            cell(self.coupled),
            cell(self.err_nested),
            cell(self.err_coupled),
            self.runtime_ms
        )
    }
}

/// Parses the summary CSV written by [`RobustnessReport::to_csv`].
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SUMMARY_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: format!("expected header `{SUMMARY_HEADER}`") }),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| Error::Parse { line: line_no, message: m };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", f.len())));
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| err(format!("invalid number `{s}`")))
            }
        };
        rows.push(SummaryRow {
            n: f[0].parse().map_err(|_| err(format!("invalid n `{}`", f[0])))?,
            input_proxy: opt(f[1])?,
            nested: opt(f[2])?,
            coupled: opt(f[3])?,
            err_nested: opt(f[4])?,
            err_coupled: opt(f[5])?,
            runtime_ms: f[6].parse().map_err(|_| err(format!("invalid runtime `{}`", f[6])))?,
        });
    }
    Ok(rows)
}

/// [`run_experiment_with`] using the built-in estimators.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RobustnessReport> {
    run_experiment_with(config, &EstimatorRegistry::default())
}

/// Runs every `n` of the grid. Invalid configurations are errors; failures
/// inside a cell are recorded in that cell and the run continues.
pub fn run_experiment_with(config: &ExperimentConfig, registry: &EstimatorRegistry) -> Result<RobustnessReport> {
    config.validate()?;
    let estimator = registry.build(&config.estimator)?;
    let q = config.arm_q();
    let mut records = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let start = Instant::now();
        let seed = derive(config.seed, n as u64);
        let mut rec = NRecord::empty(n, seed);
        match input_distance_proxy(&config.process_p, &q, n) {
            Ok(d) => {
                rec.input_proxy = Some(d.mixture);
                rec.input_resolution = Some(d.resolution);
                rec.input_joint = d.joint;
            }
            Err(e) => rec.failures.push(format!("input: {e}")),
        }
        let arms = law_of_laws(
            &config.process_p,
            &config.scheme,
            estimator.as_ref(),
            n,
            config.outer_reps,
            config.inner_reps,
            seed,
        )
        .and_then(|lp| {
            let lq = law_of_laws(&q, &config.scheme, estimator.as_ref(), n, config.outer_reps, config.inner_reps, seed)?;
            Ok((lp, lq))
        });
        match arms {
            Ok((lp, lq)) => {
                rec.binning_resolution = Some(lp.binning_resolution.max(lq.binning_resolution));
                match paired_estimate(&lp, &lq, config.method.nested(), config.method.coupled(), seed) {
                    Ok(e) => {
                        rec.nested = e.nested;
                        rec.coupled = e.coupled;
                        rec.err_nested = e.err_nested;
                        rec.err_coupled = e.err_coupled;
                    }
                    Err(e) => rec.failures.push(format!("distance: {e}")),
                }
            }
            Err(e) => rec.failures.push(format!("bootstrap: {e}")),
        }
        rec.runtime_ms = start.elapsed().as_millis() as u64;
        records.push(rec);
    }
    Ok(RobustnessReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        records,
    })
}
