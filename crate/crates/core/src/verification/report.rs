use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStat {
    pub max: f64,
    pub mean: f64,
}

/// Per-sample residuals, one row per sample point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualTable {
    pub columns: Vec<String>,
    pub rows: Vec<SampleRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub point: Vec<f64>,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub label: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub residuals: BTreeMap<String, ResidualStat>,
    pub pass: bool,
    pub worst_point: Vec<f64>,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub table: ResidualTable,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn max(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).map(|r| r.max)
    }

    /// Names of identities whose max residual exceeds their tolerance.
    pub fn failing(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(k, v)| !within(v.max, self.tolerance_of(k)))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn tolerance_of(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(self.tolerance)
    }

    /// Header row plus one row per sample: coordinates, then residuals.
    pub fn to_csv(&self) -> String {
        let dim = self.table.rows.first().map_or(0, |r| r.point.len());
        let mut out = String::new();
        let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        header.extend(self.table.columns.iter().cloned());
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row
                .point
                .iter()
                .chain(row.residuals.iter())
                .map(|v| format!("{v:e}"))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn within(v: f64, tol: f64) -> bool {
    v.is_finite() && v <= tol
}

/// Collects residual rows into a report.
pub struct ReportBuilder {
    suite: String,
    label: String,
    seed: u64,
    tolerance: f64,
    columns: Vec<String>,
    tolerances: BTreeMap<String, f64>,
    notes: Vec<String>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(suite: &str, label: &str, seed: u64, tolerance: f64, columns: &[&str]) -> ReportBuilder {
        ReportBuilder {
            suite: suite.into(),
            label: label.into(),
            seed,
            tolerance,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            tolerances: BTreeMap::new(),
            notes: Vec::new(),
            start: Instant::now(),
        }
    }

    pub fn tolerance_for(mut self, column: &str, tol: f64) -> ReportBuilder {
        self.tolerances.insert(column.into(), tol);
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn finish(self, rows: Vec<SampleRow>) -> VerificationReport {
        let ncol = self.columns.len();
        let mut stats = vec![(0.0f64, 0.0f64); ncol];
        let mut worst = (f64::NEG_INFINITY, Vec::new());
        for row in &rows {
            let mut score = 0.0f64;
            for (c, v) in row.residuals.iter().enumerate() {
                let v = if v.is_nan() { f64::INFINITY } else { *v };
                stats[c].0 = stats[c].0.max(v);
                stats[c].1 += v;
                let tol = self.tolerances.get(&self.columns[c]).copied().unwrap_or(self.tolerance);
                score = score.max(v / tol.max(f64::MIN_POSITIVE));
            }
            if score > worst.0 {
                worst = (score, row.point.clone());
            }
        }
        let count = rows.len().max(1) as f64;
        let residuals: BTreeMap<String, ResidualStat> = self
            .columns
            .iter()
            .zip(&stats)
            .map(|(c, (m, s))| (c.clone(), ResidualStat { max: *m, mean: s / count }))
            .collect();
        let pass = !rows.is_empty()
            && residuals.iter().all(|(k, v)| {
                within(v.max, self.tolerances.get(k).copied().unwrap_or(self.tolerance))
            });
        VerificationReport {
            suite: self.suite,
            label: self.label,
            samples: rows.len(),
            seed: self.seed,
            tolerance: self.tolerance,
            residuals,
            pass,
            worst_point: worst.1,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            tolerances: self.tolerances,
            table: ResidualTable {
                columns: self.columns,
                rows,
            },
            notes: self.notes,
        }
    }
}

/// Evaluates `f` at every point in parallel; rows keep the input order so
/// reductions are deterministic.
pub fn evaluate<F>(points: &[Vec<f64>], f: F) -> Result<Vec<SampleRow>>
where
    F: Fn(usize, &[f64]) -> Result<Vec<f64>> + Sync,
{
    let results: Vec<Result<Vec<f64>>> = points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect();
    results
        .into_iter()
        .zip(points)
        .map(|(r, p)| {
            r.map(|residuals| SampleRow {
                point: p.clone(),
                residuals,
            })
        })
        .collect()
}

/// Independent random stream for sample `index`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
