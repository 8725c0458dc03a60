//! Iteration schemes and their convergence diagnostics.
//!
//! In ℝⁿ weak and norm convergence coincide, so every convergence notion
//! below is plain norm convergence observed over a finite horizon.

mod diagnostics;
mod steps;

pub use diagnostics::{
    compare_schemes, comparison_row, energy_check, fejer_check, projection_sequence_check,
    residual_limit_check, ComparisonRow, MonotoneCheck, ProjectionCheck, SchemeCase,
};
pub use steps::{make_step_sequence, StepSequence, StepSpec};

use serde::{Deserialize, Serialize};

use crate::convex::ConvexSet;
use crate::error::{Error, Result};
use crate::geometry::{dist, mann_combination, norm, Point};
use crate::mappings::Mapping;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeKind {
    /// `x_{n+1} = T x_n`.
    Picard,
    /// `x_{n+1} = (1−α_n)x_n + α_n T x_n`.
    Mann,
    /// `y_n = (1−β_n)x_n + β_n T x_n`, `x_{n+1} = (1−α_n)x_n + α_n T y_n`.
    Ishikawa { beta: StepSequence },
    /// `y_n = (1−α_n)x_n + α_n T x_n`, `x_{n+1} = T y_n`.
    PicardMann,
    /// `y_n = (1−α_n)x_n + α_n T x_n`, `x_{n+1} = S y_n`.
    TwoMapPicardMann,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Picard => "picard",
            SchemeKind::Mann => "mann",
            SchemeKind::Ishikawa { .. } => "ishikawa",
            SchemeKind::PicardMann => "picard_mann",
            SchemeKind::TwoMapPicardMann => "two_map_picard_mann",
        }
    }

    /// Whether `x_{n+1}` is produced through an auxiliary point `y_n`.
    pub fn has_auxiliary(&self) -> bool {
        !matches!(self, SchemeKind::Picard | SchemeKind::Mann)
    }
}

/// When to stop iterating.
///
/// The run stops with [`StopReason::ToleranceMet`] once the last `window`
/// residuals (of `T`, and of `S` when present) are all `≤ tol` and at
/// least `min_iters` steps were taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub tol: f64,
    pub max_iters: usize,
    #[serde(default)]
    pub min_iters: usize,
    #[serde(default = "one")]
    pub window: usize,
    /// Defaults to `10⁸ (1 + ‖x₀‖)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_bound: Option<f64>,
}

fn one() -> usize {
    1
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 10_000,
            min_iters: 0,
            window: 1,
            divergence_bound: None,
        }
    }
}

impl StopRule {
    pub fn with_tol(tol: f64, max_iters: usize) -> Self {
        Self {
            tol,
            max_iters,
            ..Self::default()
        }
    }

    fn bound(&self, x0: &Point) -> f64 {
        self.divergence_bound.unwrap_or(1e8 * (1.0 + norm(x0)))
    }
}

/// Optional observers; they never influence the recurrence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Probes {
    pub z_ref: Option<Point>,
    pub cap_set: Option<ConvexSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum StopReason {
    ToleranceMet,
    MaxIters,
    /// Step `step` produced an iterate of norm `norm` above the divergence
    /// bound (or a non-finite one); that iterate is not stored.
    Diverged { step: usize, norm: f64 },
}

/// The sequence `x_1 = x_0, x_2, …` of one run with per-step series.
///
/// `iterates`, `residuals_t`, `residuals_s`, `distances`, and
/// `projections` are indexed by iterate. `auxiliary` and `step_sizes` are
/// indexed by step and have one entry fewer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub scheme: String,
    pub iterates: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<Vec<Point>>,
    pub step_sizes: Vec<f64>,
    pub residuals_t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals_s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projections: Option<Vec<Point>>,
    pub stop_reason: StopReason,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn final_iterate(&self) -> &Point {
        self.iterates.last().expect("traces are nonempty")
    }

    /// Larger of the two residuals at iterate `i`.
    pub fn residual(&self, i: usize) -> f64 {
        let s = self.residuals_s.as_ref().map_or(0.0, |r| r[i]);
        self.residuals_t[i].max(s)
    }

    /// First 0-based iterate index whose residuals are `≤ tol`, which is
    /// the number of steps taken to get there.
    pub fn iterations_to_tol(&self, tol: f64) -> Option<usize> {
        (0..self.len()).find(|&i| self.residual(i) <= tol)
    }

    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::ToleranceMet
    }
}

struct Recorder<'a> {
    t: &'a Mapping,
    s: Option<&'a Mapping>,
    probes: &'a Probes,
    trace: ConvergenceTrace,
}

impl<'a> Recorder<'a> {
    /// Stores `x` and its per-iterate series; returns `T x`.
    fn push(&mut self, x: Point) -> Result<Point> {
        let tx = self.t.eval(&x)?;
        self.trace.residuals_t.push(dist(&tx, &x)?);
        if let (Some(s), Some(r)) = (self.s, self.trace.residuals_s.as_mut()) {
            r.push(dist(&s.eval(&x)?, &x)?);
        }
        if let (Some(z), Some(d)) = (&self.probes.z_ref, self.trace.distances.as_mut()) {
            d.push(dist(&x, z)?);
        }
        if let (Some(c), Some(p)) = (&self.probes.cap_set, self.trace.projections.as_mut()) {
            p.push(c.project(&x)?);
        }
        self.trace.iterates.push(x);
        Ok(tx)
    }

    fn settled(&self, stop: &StopRule) -> bool {
        let n = self.trace.len();
        let steps = n - 1;
        steps >= stop.min_iters
            && n >= stop.window.max(1)
            && (n - stop.window.max(1)..n).all(|i| self.trace.residual(i) <= stop.tol)
    }
}

fn inside(m: &Mapping, x: &Point, step: usize, which: &'static str) -> Result<()> {
    if m.domain().contains_default(x)? {
        Ok(())
    } else {
        Err(Error::LeftDomain {
            step,
            which,
            point: x.clone(),
            domain: m.domain().to_string(),
        })
    }
}

/// Runs `kind` from `x0`.
///
/// `s` is required by the two-map scheme; for the other schemes it is only
/// observed through `residuals_s` and joins the stop rule. Iterates and
/// auxiliary points leaving the domain are errors naming the step;
/// divergence ends the trace normally.
pub fn run_scheme(
    kind: &SchemeKind,
    s: Option<&Mapping>,
    t: &Mapping,
    x0: &Point,
    steps: &StepSequence,
    stop: &StopRule,
    probes: &Probes,
) -> Result<ConvergenceTrace> {
    if let Some(s) = s {
        if s.domain() != t.domain() {
            return Err(Error::DomainMismatch(format!(
                "S acts on {}, T acts on {}",
                s.domain(),
                t.domain()
            )));
        }
    }
    let two_map = match (kind, s) {
        (SchemeKind::TwoMapPicardMann, Some(s)) => Some(s),
        (SchemeKind::TwoMapPicardMann, None) => return Err(Error::MissingParameter("S")),
        _ => None,
    };
    inside(t, x0, 0, "x_1")?;
    let bound = stop.bound(x0);

    let mut rec = Recorder {
        t,
        s,
        probes,
        trace: ConvergenceTrace {
            scheme: kind.name().to_string(),
            iterates: Vec::new(),
            auxiliary: kind.has_auxiliary().then(Vec::new),
            step_sizes: Vec::new(),
            residuals_t: Vec::new(),
            residuals_s: s.map(|_| Vec::new()),
            distances: probes.z_ref.as_ref().map(|_| Vec::new()),
            projections: probes.cap_set.as_ref().map(|_| Vec::new()),
            stop_reason: StopReason::MaxIters,
        },
    };
    let mut x = x0.clone();
    let mut tx = rec.push(x.clone())?;

    let reason = loop {
        if rec.settled(stop) {
            break StopReason::ToleranceMet;
        }
        let n = rec.trace.len();
        if n > stop.max_iters {
            break StopReason::MaxIters;
        }
        let alpha = steps.alpha(n);
        let (y, next) = match kind {
            SchemeKind::Picard => (None, tx.clone()),
            SchemeKind::Mann => (None, mann_combination(&x, &tx, alpha)?),
            SchemeKind::Ishikawa { beta } => {
                let y = mann_combination(&x, &tx, beta.alpha(n))?;
                inside(t, &y, n, "y_n")?;
                let next = mann_combination(&x, &t.eval(&y)?, alpha)?;
                (Some(y), next)
            }
            SchemeKind::PicardMann | SchemeKind::TwoMapPicardMann => {
                let y = mann_combination(&x, &tx, alpha)?;
                inside(t, &y, n, "y_n")?;
                let next = two_map.unwrap_or(t).eval(&y)?;
                (Some(y), next)
            }
        };
        let size = norm(&next);
        if !(size <= bound) {
            break StopReason::Diverged { step: n, norm: size };
        }
        inside(t, &next, n, "x_{n+1}")?;
        if let (Some(y), Some(aux)) = (y, rec.trace.auxiliary.as_mut()) {
            aux.push(y);
        }
        rec.trace.step_sizes.push(alpha);
        x = next;
        tx = rec.push(x.clone())?;
    };
    rec.trace.stop_reason = reason;
    Ok(rec.trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{Domain, Family};

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn scale(c: f64) -> Mapping {
        Mapping::new(Family::Scale { factor: c }, Domain::interval(-1.0, 1.0)).unwrap()
    }

    fn half() -> StepSequence {
        StepSequence::constant(0.5).unwrap()
    }

    fn fixed_steps(n: usize) -> StopRule {
        StopRule {
            tol: 0.0,
            max_iters: n,
            min_iters: n,
            window: 1,
            divergence_bound: None,
        }
    }

    #[test]
    fn picard_mann_closed_form() {
        let t = scale(0.5);
        let tr = run_scheme(
            &SchemeKind::PicardMann,
            None,
            &t,
            &p(&[1.0]),
            &half(),
            &fixed_steps(10),
            &Probes::default(),
        )
        .unwrap();
        assert_eq!(tr.len(), 11);
        assert_eq!(tr.stop_reason, StopReason::MaxIters);
        // every factor is a power of two times 3, so this is exact
        for (k, x) in tr.iterates.iter().enumerate() {
            assert_eq!(x.coords()[0], 0.375f64.powi(k as i32));
        }
        let aux = tr.auxiliary.as_ref().unwrap();
        assert_eq!(aux.len(), 10);
        assert_eq!(aux[0], p(&[0.75]));
    }

    #[test]
    fn mann_on_reflection_hits_zero() {
        let t = scale(-1.0);
        let tr = run_scheme(
            &SchemeKind::Mann,
            None,
            &t,
            &p(&[1.0]),
            &half(),
            &fixed_steps(5),
            &Probes::default(),
        )
        .unwrap();
        assert_eq!(tr.iterates[1], p(&[0.0]));
        assert!(tr.iterates[1..].iter().all(|x| *x == p(&[0.0])));
        assert!(tr.auxiliary.is_none());
    }

    #[test]
    fn stop_rule_window_and_min_iters() {
        let t = Mapping::identity(Domain::interval(-1.0, 1.0)).unwrap();
        let quick = run_scheme(
            &SchemeKind::Mann,
            None,
            &t,
            &p(&[0.3]),
            &half(),
            &StopRule::default(),
            &Probes::default(),
        )
        .unwrap();
        assert_eq!(quick.len(), 1);
        assert_eq!(quick.stop_reason, StopReason::ToleranceMet);
        assert_eq!(quick.iterations_to_tol(1e-8), Some(0));

        let rule = StopRule {
            min_iters: 20,
            window: 5,
            ..StopRule::default()
        };
        let long = run_scheme(&SchemeKind::Mann, None, &t, &p(&[0.3]), &half(), &rule, &Probes::default())
            .unwrap();
        assert_eq!(long.len(), 21);
    }

    #[test]
    fn divergence_is_not_an_error() {
        let t = Mapping::new(Family::Scale { factor: 2.0 }, Domain::real_line(-1.0, 1.0)).unwrap();
        let tr = run_scheme(
            &SchemeKind::Picard,
            None,
            &t,
            &p(&[1.0]),
            &half(),
            &StopRule {
                divergence_bound: Some(100.0),
                ..StopRule::default()
            },
            &Probes::default(),
        )
        .unwrap();
        assert_eq!(
            tr.stop_reason,
            StopReason::Diverged {
                step: 7,
                norm: 128.0
            }
        );
        assert_eq!(tr.len(), 7);
    }

    #[test]
    fn leaving_the_domain_names_the_step() {
        let t = scale(2.0).into_space();
        let err = run_scheme(
            &SchemeKind::Mann,
            None,
            &t,
            &p(&[0.5]),
            &half(),
            &StopRule::default(),
            &Probes::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::LeftDomain { step: 2, which: "x_{n+1}", .. }), "{err}");
    }

    #[test]
    fn two_map_needs_s_on_the_same_domain() {
        let t = scale(0.5);
        let run = |s: Option<&Mapping>| {
            run_scheme(
                &SchemeKind::TwoMapPicardMann,
                s,
                &t,
                &p(&[1.0]),
                &half(),
                &StopRule::default(),
                &Probes::default(),
            )
        };
        assert_eq!(run(None).unwrap_err(), Error::MissingParameter("S"));
        let other = Mapping::identity(Domain::interval(0.0, 1.0)).unwrap();
        assert!(matches!(run(Some(&other)), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn reductions_are_bit_exact() {
        let t = scale(0.7);
        let id = Mapping::identity(t.domain().clone()).unwrap();
        let go = |kind: SchemeKind, s: Option<&Mapping>| {
            run_scheme(&kind, s, &t, &p(&[0.9]), &half(), &fixed_steps(500), &Probes::default())
                .unwrap()
        };
        let mann = go(SchemeKind::Mann, None);
        let pm = go(SchemeKind::PicardMann, None);
        assert_eq!(go(SchemeKind::TwoMapPicardMann, Some(&id)).iterates, mann.iterates);
        assert_eq!(go(SchemeKind::TwoMapPicardMann, Some(&t)).iterates, pm.iterates);
    }

    #[test]
    fn probes_fill_series() {
        let t = scale(0.5);
        let probes = Probes {
            z_ref: Some(p(&[0.0])),
            cap_set: Some(ConvexSet::singleton(p(&[0.0]))),
        };
        let tr = run_scheme(
            &SchemeKind::Ishikawa { beta: half() },
            Some(&t),
            &t,
            &p(&[1.0]),
            &half(),
            &fixed_steps(8),
            &probes,
        )
        .unwrap();
        assert_eq!(tr.distances.as_ref().unwrap().len(), tr.len());
        assert_eq!(tr.projections.as_ref().unwrap().len(), tr.len());
        assert_eq!(tr.residuals_s.as_ref().unwrap(), &tr.residuals_t);
        assert_eq!(tr.distances.as_ref().unwrap()[0], 1.0);
        assert_eq!(tr.step_sizes.len(), tr.len() - 1);
    }

    #[test]
    fn json_round_trip() {
        let t = scale(0.5);
        let tr = run_scheme(
            &SchemeKind::Ishikawa { beta: half() },
            None,
            &t,
            &p(&[1.0]),
            &half(),
            &fixed_steps(3),
            &Probes::default(),
        )
        .unwrap();
        let back: ConvergenceTrace = serde_json::from_str(&serde_json::to_string(&tr).unwrap()).unwrap();
        assert_eq!(back, tr);
        let kind: SchemeKind = serde_json::from_str(r#"{"kind":"ishikawa","beta":{"kind":"constant","alpha":0.5}}"#).unwrap();
        assert_eq!(kind.name(), "ishikawa");
    }
}
