//! The scenario pipeline: class checks, attractive-point machinery,
//! scheme runs, diagnostics, and verdicts.

use attractor_core::attractive::{
    cap_fixed_point_bridge, check_cap_fixedpoint_equivalence, check_convexity_of_membership,
    default_orbit_bound, estimate_cap_region, is_common_attractive, orbit_bounded, CapEstimate,
    ConvexityReport, EquivalenceReport, Membership, OrbitReport,
};
use attractor_core::mappings::{
    check_berinde, check_further_hybrid, check_nonexpansive, check_normally_hybrid,
    check_quasi_nonexpansive, check_theorem_conditions, check_widely_more_hybrid,
    ClassCheckReport, HybridClass, PairSet, TheoremConditions,
};
use attractor_core::schemes::{
    comparison_row, energy_check, fejer_check, projection_sequence_check, residual_limit_check,
    run_scheme, ComparisonRow, MonotoneCheck, ProjectionCheck,
};
use attractor_core::{ConvergenceTrace, Mapping, Point, Probes, SchemeKind};
use serde::Serialize;

use crate::scenario::Scenario;

#[derive(Debug, thiserror::Error)]
#[error("scenario {scenario}, phase {phase}: {source}")]
pub struct RunError {
    pub scenario: String,
    pub phase: &'static str,
    #[source]
    pub source: attractor_core::Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedClassReport {
    /// `"s"` or `"t"`.
    pub map: &'static str,
    #[serde(flatten)]
    pub report: ClassCheckReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeOutcome {
    pub z: Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeDiagnostics {
    pub scheme: String,
    pub iterations: usize,
    pub stop_reason: attractor_core::schemes::StopReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fejer: Option<MonotoneCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<MonotoneCheck>,
    pub residual_limit: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictLine {
    pub name: String,
    pub expected: bool,
    pub actual: bool,
    pub pass: bool,
}

/// Everything one scenario run produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunBundle {
    pub scenario: Scenario,
    pub domain_sample_size: usize,
    pub class_reports: Vec<NamedClassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_conditions: Option<TheoremConditions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_ref: Option<Membership>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<CapEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convexity: Option<ConvexityReport>,
    pub orbit: OrbitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bridge: Option<BridgeOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceReport>,
    pub diagnostics: Vec<SchemeDiagnostics>,
    #[serde(skip)]
    pub traces: Vec<ConvergenceTrace>,
    pub comparison: Vec<ComparisonRow>,
    pub verdicts: Vec<VerdictLine>,
}

impl RunBundle {
    pub fn failures(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.pass).count()
    }

    pub fn verdict(&self, name: &str) -> Option<&VerdictLine> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

fn class_report(
    class: HybridClass,
    sc: &Scenario,
    m: &Mapping,
    pairs: &PairSet,
    sample: &[Point],
) -> attractor_core::Result<ClassCheckReport> {
    let checks = sc.class_checks.as_ref().expect("caller checked");
    let tol = sc.tolerances.class;
    match class {
        HybridClass::Ngm => check_normally_hybrid(m, &checks.params, pairs, tol),
        HybridClass::Sgm => check_further_hybrid(m, &checks.params, pairs, tol),
        HybridClass::Wmgm => check_widely_more_hybrid(m, &checks.params, pairs, tol),
        HybridClass::Nonexpansive => check_nonexpansive(m, pairs, tol),
        HybridClass::BerindeQuasiContractive => {
            let b = checks.berinde.expect("validated");
            check_berinde(m, b.contraction, b.residual_weight, pairs, tol)
        }
        HybridClass::QuasiNonexpansive => {
            let fixed = sc.probes.fixed_points.as_deref().unwrap_or_default();
            check_quasi_nonexpansive(m, fixed, sample, tol)
        }
    }
}

/// Only the class verifiers and the theorem-condition gate.
pub fn check_classes(
    sc: &Scenario,
) -> Result<(Vec<NamedClassReport>, Option<TheoremConditions>), RunError> {
    let fail = |phase| {
        move |source| RunError {
            scenario: sc.name.clone(),
            phase,
            source,
        }
    };
    let t = sc.t_mapping().map_err(fail("setup"))?;
    let s = sc.s_mapping().map_err(fail("setup"))?;
    let sample = sc.domain_sample().map_err(fail("sampling"))?;
    let Some(checks) = &sc.class_checks else {
        return Ok((Vec::new(), None));
    };
    let pairs = PairSet::Grid(sample.clone());
    let mut reports = Vec::new();
    let maps: Vec<(&'static str, &Mapping)> = match &s {
        Some(s) => vec![("t", &t), ("s", s)],
        None => vec![("t", &t)],
    };
    for (name, m) in maps {
        for &class in &checks.classes {
            let report = class_report(class, sc, m, &pairs, &sample).map_err(fail("class checks"))?;
            reports.push(NamedClassReport { map: name, report });
        }
    }
    Ok((reports, Some(check_theorem_conditions(&checks.params))))
}

/// Runs every phase of `sc` in order.
pub fn run_scenario(sc: &Scenario) -> Result<RunBundle, RunError> {
    let fail = |phase| {
        move |source| RunError {
            scenario: sc.name.clone(),
            phase,
            source,
        }
    };
    let tol = sc.tolerances;
    let t = sc.t_mapping().map_err(fail("setup"))?;
    let s = sc.s_mapping().map_err(fail("setup"))?;
    let s_or_t = s.as_ref().unwrap_or(&t);
    let sample = sc.domain_sample().map_err(fail("sampling"))?;

    let (class_reports, theorem_conditions) = check_classes(sc)?;

    let z_ref = sc
        .probes
        .z_ref
        .as_ref()
        .map(|z| is_common_attractive(s_or_t, &t, z, &sample, tol.membership))
        .transpose()
        .map_err(fail("reference point"))?;

    let cap = sc
        .probes
        .candidates
        .as_ref()
        .map(|g| {
            let candidates = g.points()?;
            estimate_cap_region(s_or_t, &t, &sample, &candidates, tol.membership)
        })
        .transpose()
        .map_err(fail("cap estimation"))?;
    let convexity = match &cap {
        Some(est) if !est.members.is_empty() => Some(
            check_convexity_of_membership(
                |z, tol| Ok(is_common_attractive(s_or_t, &t, z, &sample, tol)?.member),
                &est.members,
                sc.convexity_trials,
                sc.sampling.seed,
                tol.convexity,
            )
            .map_err(fail("cap convexity"))?,
        ),
        _ => None,
    };

    let orbit_spec = sc.orbit.clone().unwrap_or(crate::scenario::OrbitSpec {
        start: None,
        horizon: attractor_core::attractive::DEFAULT_ORBIT_HORIZON,
        bound: None,
    });
    let start = orbit_spec.start.clone().unwrap_or_else(|| sc.x0.clone());
    let bound = orbit_spec.bound.unwrap_or_else(|| default_orbit_bound(&start));
    let orbit = orbit_bounded(s_or_t, &t, &start, orbit_spec.horizon, bound).map_err(fail("orbit"))?;

    let probes = Probes {
        z_ref: sc.probes.z_ref.clone(),
        cap_set: sc.probes.cap_set.clone(),
    };
    let mut traces = Vec::new();
    let mut diagnostics = Vec::new();
    for kind in &sc.schemes {
        let s_arg = match kind {
            SchemeKind::TwoMapPicardMann => s.as_ref(),
            _ => None,
        };
        let trace = run_scheme(kind, s_arg, &t, &sc.x0, &sc.steps, &sc.stop, &probes)
            .map_err(fail("schemes"))?;
        let fejer = probes
            .z_ref
            .as_ref()
            .map(|z| fejer_check(&trace, z, tol.fejer))
            .transpose()
            .map_err(fail("diagnostics"))?;
        let energy = match (&probes.z_ref, kind) {
            (Some(z), SchemeKind::Mann | SchemeKind::PicardMann | SchemeKind::TwoMapPicardMann) => {
                Some(energy_check(&trace, z, tol.energy).map_err(fail("diagnostics"))?)
            }
            _ => None,
        };
        let projection = probes
            .cap_set
            .as_ref()
            .map(|_| projection_sequence_check(&trace, tol.projection, tol.window, tol.limit))
            .transpose()
            .map_err(fail("diagnostics"))?;
        diagnostics.push(SchemeDiagnostics {
            scheme: trace.scheme.clone(),
            iterations: trace.len() - 1,
            stop_reason: trace.stop_reason.clone(),
            fejer,
            energy,
            residual_limit: residual_limit_check(&trace, tol.residual, tol.window),
            projection,
        });
        traces.push(trace);
    }

    let certified = z_ref.as_ref().is_some_and(|m| m.member);
    let bridge = match (sc.domain.as_convex_set(), &sc.probes.z_ref) {
        (Some(c), Some(z)) if certified => {
            let outcome = cap_fixed_point_bridge(s_or_t, &t, z, &c, tol.bridge);
            Some(match outcome {
                Ok(u) => BridgeOutcome {
                    z: z.clone(),
                    point: Some(u),
                    error: None,
                },
                Err(e) => BridgeOutcome {
                    z: z.clone(),
                    point: None,
                    error: Some(e.to_string()),
                },
            })
        }
        _ => None,
    };

    let equivalence = sc
        .probes
        .fixed_points
        .as_ref()
        .map(|fixed| check_cap_fixedpoint_equivalence(s_or_t, &t, &sample, fixed, tol.membership))
        .transpose()
        .map_err(fail("equivalence"))?;

    let comparison = traces
        .iter()
        .map(|tr| comparison_row(&sc.name, tr, tol.compare))
        .collect();

    let mut bundle = RunBundle {
        scenario: sc.clone(),
        domain_sample_size: sample.len(),
        class_reports,
        theorem_conditions,
        z_ref,
        cap,
        convexity,
        orbit,
        bridge,
        equivalence,
        diagnostics,
        traces,
        comparison,
        verdicts: Vec::new(),
    };
    bundle.verdicts = verdicts(&bundle);
    Ok(bundle)
}

/// Verdicts re-derived from the stored reports.
pub fn verdicts(b: &RunBundle) -> Vec<VerdictLine> {
    let mut raw: Vec<(String, bool)> = Vec::new();
    for r in &b.class_reports {
        raw.push((format!("class.{}.{}", r.map, r.report.class.name()), r.report.holds()));
    }
    if let Some(tc) = &b.theorem_conditions {
        raw.push(("theorem_conditions".into(), tc.holds));
    }
    if let Some(m) = &b.z_ref {
        raw.push(("zref.certified".into(), m.member));
    }
    if let Some(cap) = &b.cap {
        raw.push(("cap.nonempty".into(), !cap.members.is_empty()));
    }
    if let Some(c) = &b.convexity {
        raw.push(("cap.convexity".into(), c.passed()));
    }
    raw.push(("orbit.bounded".into(), b.orbit.bounded()));
    for d in &b.diagnostics {
        if let Some(f) = &d.fejer {
            raw.push((format!("fejer.{}", d.scheme), f.holds));
        }
        if let Some(e) = &d.energy {
            raw.push((format!("energy.{}", d.scheme), e.holds));
        }
        raw.push((format!("residual.{}", d.scheme), d.residual_limit));
        if let Some(p) = &d.projection {
            raw.push((format!("projection.{}", d.scheme), p.holds));
        }
    }
    if let Some(br) = &b.bridge {
        raw.push(("bridge".into(), br.error.is_none()));
    }
    if let Some(eq) = &b.equivalence {
        raw.push(("equivalence".into(), eq.passed()));
    }
    raw.into_iter()
        .map(|(name, actual)| {
            let expected = b.scenario.expect.get(&name).copied().unwrap_or(true);
            VerdictLine {
                name,
                expected,
                actual,
                pass: expected == actual,
            }
        })
        .collect()
}

/// Expectation keys that name no produced verdict; a typo guard.
pub fn unmatched_expectations(b: &RunBundle) -> Vec<String> {
    b.scenario
        .expect
        .keys()
        .filter(|k| !b.verdicts.iter().any(|v| &v.name == *k))
        .cloned()
        .collect()
}
