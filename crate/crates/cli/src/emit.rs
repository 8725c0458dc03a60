//! Writing run bundles to disk.
//!
//! Per scenario directory `<out>/<name>/`:
//! - `trace_<scheme>.csv` (or `.json`), one per scheme run;
//! - `summary.json`, every report and verdict plus the scenario itself;
//! - `comparison.csv`, one row per scheme.
//!
//! Trace CSV columns, in order: `n` (1-based), `x1..xd`, `residual_T`,
//! `residual_S`, `dist_to_zref`, `proj_step_delta`. Absent series leave
//! their column empty; `proj_step_delta` is empty on the first row.
//! Directories are assembled under a temporary name and renamed into
//! place, so a failed write leaves no partial scenario directory.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use attractor_core::geometry::dist;
use attractor_core::schemes::ComparisonRow;
use attractor_core::ConvergenceTrace;

use crate::run::{RunBundle, VerdictLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> EmitError + '_ {
    move |source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Shortest round-trip decimal; non-finite values are spelled out.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite floats serialize")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn optional(v: Option<f64>) -> String {
    v.map(number).unwrap_or_default()
}

pub fn trace_header(dim: usize) -> Vec<String> {
    let mut h = vec!["n".to_string()];
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h.extend(
        ["residual_T", "residual_S", "dist_to_zref", "proj_step_delta"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

pub fn trace_csv(trace: &ConvergenceTrace) -> Result<String, csv::Error> {
    let dim = trace.final_iterate().dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trace_header(dim))?;
    for (i, x) in trace.iterates.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(x.coords().iter().map(|&v| number(v)));
        row.push(number(trace.residuals_t[i]));
        row.push(optional(trace.residuals_s.as_ref().map(|r| r[i])));
        row.push(optional(trace.distances.as_ref().map(|d| d[i])));
        let delta = match (&trace.projections, i) {
            (Some(p), i) if i > 0 => Some(dist(&p[i], &p[i - 1]).expect("same dimension")),
            _ => None,
        };
        row.push(optional(delta));
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scenario",
        "scheme",
        "iterations_to_tol",
        "final_residual",
        "final_distance",
    ])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.scheme.clone(),
            r.iterations_to_tol.map_or("inf".into(), |n| n.to_string()),
            number(r.final_residual),
            optional(r.final_distance),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

pub fn verdicts_csv(rows: &[(String, &VerdictLine)]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "verdict", "expected", "actual", "pass"])?;
    for (scenario, v) in rows {
        w.write_record([
            scenario.clone(),
            v.name.clone(),
            v.expected.to_string(),
            v.actual.to_string(),
            v.pass.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

fn json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `bundle` to `<out_dir>/<scenario name>/`, replacing any previous
/// directory of that name. Returns the written files in order.
pub fn emit(bundle: &RunBundle, format: Format, out_dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    let name = &bundle.scenario.name;
    fs::create_dir_all(out_dir).map_err(io_at(out_dir))?;
    let staging = out_dir.join(format!(".{name}.partial"));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_at(&staging))?;
    }
    fs::create_dir(&staging).map_err(io_at(&staging))?;

    let mut files: Vec<(String, String)> = Vec::new();
    for trace in &bundle.traces {
        let (file, body) = match format {
            Format::Csv => (
                format!("trace_{}.csv", trace.scheme),
                trace_csv(trace).map_err(|source| EmitError::Csv {
                    path: staging.join(format!("trace_{}.csv", trace.scheme)),
                    source,
                })?,
            ),
            Format::Json => (format!("trace_{}.json", trace.scheme), json(trace)),
        };
        files.push((file, body));
    }
    files.push(("summary.json".into(), json(bundle)));
    let comparison = comparison_csv(&bundle.comparison).map_err(|source| EmitError::Csv {
        path: staging.join("comparison.csv"),
        source,
    })?;
    files.push(("comparison.csv".into(), comparison));

    for (file, body) in &files {
        let path = staging.join(file);
        fs::write(&path, body).map_err(io_at(&path))?;
    }
    let target = out_dir.join(name);
    if target.exists() {
        fs::remove_dir_all(&target).map_err(io_at(&target))?;
    }
    fs::rename(&staging, &target).map_err(io_at(&target))?;
    Ok(files.into_iter().map(|(f, _)| target.join(f)).collect())
}
