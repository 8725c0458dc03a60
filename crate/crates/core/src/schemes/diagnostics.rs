use serde::{Deserialize, Serialize};

use super::{run_scheme, ConvergenceTrace, Probes, SchemeKind, StepSequence, StopRule};
use crate::error::{Error, Result};
use crate::geometry::{dist, dist_sq, Point};
use crate::mappings::Mapping;

/// Outcome of a per-step inequality along a trace.
///
/// `first_violation` is the 0-based index of the later iterate of the
/// first failing pair; `max_excess` the largest (possibly negative)
/// left-minus-right difference seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
    pub max_excess: f64,
    pub pairs_checked: usize,
}

fn monotone(pairs: impl Iterator<Item = Result<f64>>, tol: f64) -> Result<MonotoneCheck> {
    let mut first_violation = None;
    let mut max_excess = f64::NEG_INFINITY;
    let mut pairs_checked = 0;
    for (i, excess) in pairs.enumerate() {
        let excess = excess?;
        pairs_checked += 1;
        max_excess = max_excess.max(excess);
        if excess > tol && first_violation.is_none() {
            first_violation = Some(i + 1);
        }
    }
    Ok(MonotoneCheck {
        holds: first_violation.is_none(),
        first_violation,
        max_excess,
        pairs_checked,
    })
}

/// `dist(x_{n+1}, z) ≤ dist(x_n, z) + tol` for all consecutive iterates.
///
/// Meaningful only for `z` in the common attractive set of the scheme's
/// mappings; the caller certifies that.
pub fn fejer_check(trace: &ConvergenceTrace, z: &Point, tol: f64) -> Result<MonotoneCheck> {
    let d = trace
        .iterates
        .iter()
        .map(|x| dist(x, z))
        .collect::<Result<Vec<_>>>()?;
    monotone(d.windows(2).map(|w| Ok(w[1] - w[0])), tol)
}

/// `‖x_{n+1}−z‖² ≤ ‖x_n−z‖² − α_n(1−α_n)‖Tx_n−x_n‖² + tol` per step.
///
/// Defined for the schemes whose step is a Mann average of `T`, possibly
/// followed by one application of an attracting map.
pub fn energy_check(trace: &ConvergenceTrace, z: &Point, tol: f64) -> Result<MonotoneCheck> {
    if !matches!(
        trace.scheme.as_str(),
        "mann" | "picard_mann" | "two_map_picard_mann"
    ) {
        return Err(Error::InvalidArgument(format!(
            "the energy inequality is not defined for {}",
            trace.scheme
        )));
    }
    let it = &trace.iterates;
    monotone(
        (0..it.len().saturating_sub(1)).map(|n| {
            let a = trace.step_sizes[n];
            let r = trace.residuals_t[n];
            Ok(dist_sq(&it[n + 1], z)? - dist_sq(&it[n], z)? + a * (1.0 - a) * r * r)
        }),
        tol,
    )
}

/// Whether the final `window` residuals are all `≤ tol`. Traces shorter
/// than the window fail.
pub fn residual_limit_check(trace: &ConvergenceTrace, tol: f64, window: usize) -> bool {
    let n = trace.len();
    window >= 1 && n >= window && (n - window..n).all(|i| trace.residual(i) <= tol)
}

/// Outcome of [`projection_sequence_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionCheck {
    pub holds: bool,
    /// Largest `dist(Px_n, Px_{n+1})` over the final window.
    pub max_window_step: f64,
    pub limit: Point,
    /// `dist(limit, final iterate)`, checked only for converged traces.
    pub limit_distance: f64,
    pub limit_checked: bool,
}

/// `Px_n` settles (final-window steps `≤ tol`); for converged traces also
/// `dist(lim Px_n, x_final) ≤ limit_tol`.
pub fn projection_sequence_check(
    trace: &ConvergenceTrace,
    tol: f64,
    window: usize,
    limit_tol: f64,
) -> Result<ProjectionCheck> {
    let proj = trace.projections.as_ref().ok_or(Error::ProjectionsAbsent)?;
    let limit = proj.last().ok_or(Error::Empty { what: "trace" })?.clone();
    let steps = proj
        .windows(2)
        .map(|w| dist(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let enough = window >= 1 && steps.len() >= window;
    let max_window_step = if enough {
        steps[steps.len() - window..].iter().fold(0.0, |a: f64, &b| a.max(b))
    } else {
        f64::INFINITY
    };
    let limit_distance = dist(&limit, trace.final_iterate())?;
    let limit_checked = trace.converged();
    let holds = enough && max_window_step <= tol && (!limit_checked || limit_distance <= limit_tol);
    Ok(ProjectionCheck {
        holds,
        max_window_step,
        limit,
        limit_distance,
        limit_checked,
    })
}

/// One row of a scheme comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub scenario: String,
    pub scheme: String,
    /// `None` when the tolerance was never reached.
    pub iterations_to_tol: Option<usize>,
    pub final_residual: f64,
    pub final_distance: Option<f64>,
}

pub fn comparison_row(scenario: &str, trace: &ConvergenceTrace, tol: f64) -> ComparisonRow {
    ComparisonRow {
        scenario: scenario.to_string(),
        scheme: trace.scheme.clone(),
        iterations_to_tol: trace.iterations_to_tol(tol),
        final_residual: trace.residual(trace.len() - 1),
        final_distance: trace.distances.as_ref().and_then(|d| d.last().copied()),
    }
}

/// Inputs of one comparison scenario.
#[derive(Debug, Clone)]
pub struct SchemeCase {
    pub name: String,
    pub s: Option<Mapping>,
    pub t: Mapping,
    pub x0: Point,
    pub steps: StepSequence,
    pub stop: StopRule,
    pub kinds: Vec<SchemeKind>,
    pub probes: Probes,
}

/// Runs every requested scheme of every case, rows in input order.
///
/// `S` is passed only to the two-map scheme, so the single-map rows race
/// on `T` alone.
pub fn compare_schemes(cases: &[SchemeCase], tol: f64) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    for case in cases {
        for kind in &case.kinds {
            let s = match kind {
                SchemeKind::TwoMapPicardMann => case.s.as_ref(),
                _ => None,
            };
            let trace = run_scheme(kind, s, &case.t, &case.x0, &case.steps, &case.stop, &case.probes)?;
            rows.push(comparison_row(&case.name, &trace, tol));
        }
    }
    Ok(rows)
}
