//! Configuration, orchestration and report output for the `sasaki` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod runner;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use sasaki_core::verification::VerificationReport;

pub use config::{parse_batch, ConfigError, Plan, RunConfig, StructureKind, Suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Report JSON with a trailing newline.
pub fn report_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// `out.json` → `out.csv`; other names get `.csv` appended.
pub fn csv_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("csv")
    } else {
        let mut s = out.as_os_str().to_owned();
        s.push(".csv");
        PathBuf::from(s)
    }
}

fn write_report(report: &VerificationReport, out: &str) -> std::io::Result<()> {
    let path = Path::new(out);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, report_json(report))?;
    fs::write(csv_path(path), report.to_csv())
}

/// Outcome of one run.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub error: Option<String>,
}

impl RunOutcome {
    pub fn status(&self) -> i32 {
        if self.report.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Runs a validated plan and writes its report when an output path is set.
pub fn run_plan(plan: &Plan) -> std::io::Result<RunOutcome> {
    let started = Instant::now();
    let (report, error) = match runner::execute(plan) {
        Ok(r) => (r, None),
        Err(e) => (runner::error_report(plan, &e, started), Some(e.to_string())),
    };
    if let Some(out) = &plan.out {
        write_report(&report, out)?;
    }
    Ok(RunOutcome { report, error })
}

/// Validates and runs one configuration.
pub fn run(config: &RunConfig) -> Result<RunOutcome, ConfigError> {
    let plan = config.validate()?;
    run_plan(&plan).map_err(|e| ConfigError::Invalid(format!("cannot write report: {e}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchEntry {
    pub index: usize,
    pub suite: String,
    pub label: String,
    pub pass: bool,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub runs: Vec<BatchEntry>,
    pub total: usize,
    pub failed: usize,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl BatchSummary {
    pub fn status(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Validates every line first, then runs all configurations concurrently.
pub fn batch(text: &str) -> Result<BatchSummary, ConfigError> {
    let started = Instant::now();
    let configs = parse_batch(text)?;
    let plans: Vec<Plan> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.validate()
                .map_err(|e| ConfigError::Invalid(format!("run {}: {e}", i + 1)))
        })
        .collect::<Result<_, _>>()?;
    let runs: Vec<BatchEntry> = plans
        .par_iter()
        .enumerate()
        .map(|(index, plan)| {
            let outcome = run_plan(plan).unwrap_or_else(|e| RunOutcome {
                report: runner::error_report(
                    plan,
                    &sasaki_core::GeometryError::State(e.to_string()),
                    Instant::now(),
                ),
                error: Some(format!("cannot write report: {e}")),
            });
            BatchEntry {
                index,
                suite: outcome.report.suite.clone(),
                label: outcome.report.label.clone(),
                pass: outcome.report.pass,
                wall_time_s: outcome.report.wall_time_s,
                error: outcome.error,
                out: plan.out.clone(),
            }
        })
        .collect();
    let failed = runs.iter().filter(|r| !r.pass).count();
    Ok(BatchSummary {
        total: runs.len(),
        failed,
        pass: failed == 0,
        runs,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Caps the global thread pool from `SASAKI_THREADS`.
pub fn configure_threads(value: Option<&str>) -> Result<(), ConfigError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| ConfigError::Invalid(format!("SASAKI_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::Invalid(e.to_string()))
}
