//! Result files and the summary table.
//!
//! CSV is long format with one row per cell followed by aggregate rows:
//!
//! | column | meaning |
//! |---|---|
//! | `schema_version` | result schema version |
//! | `kind` | `cell` or `aggregate` |
//! | `problem` | problem name, `all` for suite-wide aggregates |
//! | `algorithm`, `mode` | `mode` is empty for random search |
//! | `repetition` | empty for aggregates |
//! | `n` | 1 for cells, successful cells for aggregates |
//! | `performance`, `performance_std` | normalized final performance (std empty for cells) |
//! | `crashes_per_experiment`, `crashes_per_experiment_std` | crash rate |
//! | `crashes`, `experiments`, `failed_fits` | cell counts (empty for aggregates) |
//! | `flagged` | more than 10% failed fits (aggregates: any flagged cell) |
//! | `error` | cell failure message |
//!
//! Wall times are only in the JSON output, so CSV files are reproducible byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::runner::{Aggregate, BenchmarkResult, CellResult, RESULT_SCHEMA_VERSION};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    /// Picks the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(ExportFormat::Csv),
            Some("json") => Ok(ExportFormat::Json),
            _ => Err(Error::input(format!(
                "cannot infer result format from {}; use .csv or .json",
                path.display()
            ))),
        }
    }
}

pub const CSV_HEADER: [&str; 17] = [
    "schema_version",
    "kind",
    "problem",
    "algorithm",
    "mode",
    "repetition",
    "n",
    "performance",
    "performance_std",
    "crashes_per_experiment",
    "crashes_per_experiment_std",
    "crashes",
    "experiments",
    "failed_fits",
    "flagged",
    "error",
    "initial_rejections",
];

#[derive(Serialize)]
struct Row<'a> {
    schema_version: u32,
    kind: &'static str,
    problem: &'a str,
    algorithm: &'static str,
    mode: &'static str,
    repetition: Option<usize>,
    n: usize,
    performance: f64,
    performance_std: Option<f64>,
    crashes_per_experiment: f64,
    crashes_per_experiment_std: Option<f64>,
    crashes: Option<usize>,
    experiments: Option<usize>,
    failed_fits: Option<usize>,
    flagged: bool,
    error: &'a str,
    initial_rejections: Option<usize>,
}

fn cell_row(c: &CellResult) -> Row<'_> {
    Row {
        schema_version: RESULT_SCHEMA_VERSION,
        kind: "cell",
        problem: &c.problem,
        algorithm: c.algorithm.name(),
        mode: c.mode.map_or("", |m| m.name()),
        repetition: Some(c.repetition),
        n: 1,
        performance: c.performance,
        performance_std: None,
        crashes_per_experiment: c.crash_rate(),
        crashes_per_experiment_std: None,
        crashes: Some(c.crashes),
        experiments: Some(c.experiments),
        failed_fits: Some(c.failed_fits),
        flagged: c.flagged,
        error: c.error.as_deref().unwrap_or(""),
        initial_rejections: Some(c.initial_rejections),
    }
}

fn aggregate_row(a: &Aggregate) -> Row<'_> {
    Row {
        schema_version: RESULT_SCHEMA_VERSION,
        kind: "aggregate",
        problem: a.problem.as_deref().unwrap_or("all"),
        algorithm: a.algorithm.name(),
        mode: a.mode.map_or("", |m| m.name()),
        repetition: None,
        n: a.cells,
        performance: a.performance_mean,
        performance_std: Some(a.performance_std),
        crashes_per_experiment: a.crash_rate_mean,
        crashes_per_experiment_std: Some(a.crash_rate_std),
        crashes: None,
        experiments: None,
        failed_fits: None,
        flagged: a.flagged_cells > 0,
        error: "",
        initial_rejections: None,
    }
}

pub fn to_csv(result: &BenchmarkResult) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for c in &result.cells {
        w.serialize(cell_row(c))?;
    }
    for a in &result.aggregates {
        w.serialize(aggregate_row(a))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
}

pub fn to_json(result: &BenchmarkResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}

pub fn from_json(json: &str) -> Result<BenchmarkResult> {
    let result: BenchmarkResult = serde_json::from_str(json)?;
    if result.schema_version != RESULT_SCHEMA_VERSION {
        return Err(Error::SchemaVersion { found: result.schema_version, expected: RESULT_SCHEMA_VERSION });
    }
    Ok(result)
}

pub fn export_results(result: &BenchmarkResult, path: &Path, format: ExportFormat) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => to_csv(result)?,
        ExportFormat::Json => to_json(result)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Suite-wide aggregates as a fixed-width table.
pub fn summary_table(result: &BenchmarkResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:<16} {:>9} {:>9} {:>16} {:>9}",
        "algorithm", "mode", "mean perf", "std perf", "crashes/exp mean", "std"
    );
    for a in result.aggregates.iter().filter(|a| a.problem.is_none()) {
        let _ = writeln!(
            out,
            "{:<10} {:<16} {:>9.3} {:>9.3} {:>16.3} {:>9.3}",
            a.algorithm.label(),
            a.mode.map_or("-", |m| m.name()),
            a.performance_mean,
            a.performance_std,
            a.crash_rate_mean,
            a.crash_rate_std
        );
    }
    out
}
