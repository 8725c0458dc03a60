//! Scenario files: schema, loading, and cross-field validation.

use std::collections::BTreeMap;
use std::path::Path;

use attractor_core::mappings::{HybridClass, HybridParams};
use attractor_core::{ConvexSet, Domain, Family, Mapping, Point, SchemeKind, StepSequence, StopRule};
use serde::{Deserialize, Serialize};

/// A mapping of the scenario, acting on the scenario domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub self_map: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerindeCertificate {
    pub contraction: f64,
    pub residual_weight: f64,
}

/// Which class verifiers to run, on `T` and on `S` when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassChecks {
    pub params: HybridParams,
    pub classes: Vec<HybridClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub berinde: Option<BerindeCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    /// Grid points per axis of the domain sample.
    pub grid: usize,
    /// Extra seeded uniform points added to the grid.
    #[serde(default)]
    pub random: usize,
    pub seed: u64,
}

/// Candidate points for the region estimate: a box grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateGrid {
    pub lower: Point,
    pub upper: Point,
    pub per_axis: usize,
}

impl CandidateGrid {
    pub fn points(&self) -> attractor_core::Result<Vec<Point>> {
        Domain::Box {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
        .grid(self.per_axis)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_ref: Option<Point>,
    /// The common attractive set (or its part inside the domain) when it
    /// is known in closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_set: Option<ConvexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<CandidateGrid>,
    /// Known common fixed points, for the quasi-nonexpansive checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    /// Defaults to `x0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Point>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Defaults to `10⁶ (1 + ‖start‖)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

fn default_horizon() -> usize {
    attractor_core::attractive::DEFAULT_ORBIT_HORIZON
}

/// Tolerances of the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub class: f64,
    pub membership: f64,
    pub fejer: f64,
    pub energy: f64,
    pub residual: f64,
    pub window: usize,
    pub projection: f64,
    pub limit: f64,
    pub bridge: f64,
    pub convexity: f64,
    pub compare: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            class: 1e-9,
            membership: 1e-9,
            fejer: 1e-12,
            energy: 1e-9,
            residual: 1e-8,
            window: 10,
            projection: 1e-8,
            limit: 1e-6,
            bridge: 1e-9,
            convexity: 1e-8,
            compare: 1e-8,
        }
    }
}

fn default_convexity_trials() -> usize {
    1000
}

/// One experiment. See the README for the field-by-field schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<MapSpec>,
    pub t: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_checks: Option<ClassChecks>,
    pub sampling: Sampling,
    #[serde(default)]
    pub probes: ProbeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSpec>,
    pub x0: Point,
    pub schemes: Vec<SchemeKind>,
    pub steps: StepSequence,
    pub stop: StopRule,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_convexity_trials")]
    pub convexity_trials: usize,
    /// Expected verdict outcomes; unlisted verdicts are expected to hold.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, bool>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: cannot read: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{origin}: line {line}, column {column}, at `{field}`: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
}

impl Scenario {
    /// Parses and validates scenario JSON; `origin` names the source in
    /// error messages.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            ScenarioError::Parse {
                origin: origin.to_string(),
                line: inner.line(),
                column: inner.column(),
                field,
                message: inner.to_string(),
            }
        })?;
        sc.validate().map_err(|message| ScenarioError::Invalid {
            origin: origin.to_string(),
            message,
        })?;
        Ok(sc)
    }

    pub fn t_mapping(&self) -> attractor_core::Result<Mapping> {
        build_map(&self.t, &self.domain)
    }

    pub fn s_mapping(&self) -> attractor_core::Result<Option<Mapping>> {
        self.s.as_ref().map(|s| build_map(s, &self.domain)).transpose()
    }

    /// Grid sample of the domain plus the seeded random points.
    pub fn domain_sample(&self) -> attractor_core::Result<Vec<Point>> {
        let mut sample = self.domain.grid(self.sampling.grid)?;
        if self.sampling.random > 0 {
            sample.extend(self.domain.random(self.sampling.random, self.sampling.seed)?);
        }
        Ok(sample)
    }

    fn validate(&self) -> Result<(), String> {
        let text = |e: attractor_core::Error| e.to_string();
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(format!(
                "name `{}` must be nonempty ASCII letters, digits, '-' or '_'",
                self.name
            ));
        }
        self.domain.validate().map_err(text)?;
        let dim = self.domain.dim();
        let t = self.t_mapping().map_err(|e| format!("T: {e}"))?;
        let s = self.s_mapping().map_err(|e| format!("S: {e}"))?;

        let same = |what: &str, p: &Point| {
            if p.dim() == dim {
                Ok(())
            } else {
                Err(format!(
                    "domain mismatch: {what} has dimension {}, the domain {dim}",
                    p.dim()
                ))
            }
        };
        same("x0", &self.x0)?;
        if !self.domain.contains_default(&self.x0).map_err(text)? {
            return Err(format!("x0 = {} is outside the domain {}", self.x0, self.domain));
        }
        if let Some(z) = &self.probes.z_ref {
            same("z_ref", z)?;
        }
        if let Some(c) = &self.probes.cap_set {
            if c.dim() != dim {
                return Err(format!(
                    "domain mismatch: cap_set has dimension {}, the domain {dim}",
                    c.dim()
                ));
            }
        }
        if let Some(g) = &self.probes.candidates {
            same("candidates.lower", &g.lower)?;
            same("candidates.upper", &g.upper)?;
            g.points().map_err(|e| format!("candidates: {e}"))?;
        }
        for p in self.probes.fixed_points.iter().flatten() {
            same("a fixed point", p)?;
        }
        if let Some(o) = &self.orbit {
            if let Some(z) = &o.start {
                same("orbit.start", z)?;
            }
            if o.horizon == 0 {
                return Err("orbit.horizon must be at least 1".into());
            }
        }
        if self.sampling.grid == 0 {
            return Err("sampling.grid must be at least 1".into());
        }
        if let Some(checks) = &self.class_checks {
            checks.params.validate().map_err(text)?;
            let wide = checks.classes.contains(&HybridClass::Wmgm);
            if wide && (checks.params.varsigma.is_none() || checks.params.eta.is_none()) {
                return Err("class wmgm needs params.varsigma and params.eta".into());
            }
            if checks.classes.contains(&HybridClass::BerindeQuasiContractive)
                && checks.berinde.is_none()
            {
                return Err("class berinde-quasi-contractive needs a berinde certificate".into());
            }
            if checks.classes.contains(&HybridClass::QuasiNonexpansive)
                && self.probes.fixed_points.as_ref().is_none_or(Vec::is_empty)
            {
                return Err("class quasi-nonexpansive needs probes.fixed_points".into());
            }
        }
        if self.schemes.is_empty() {
            return Err("at least one scheme is required".into());
        }
        if self.schemes.contains(&SchemeKind::TwoMapPicardMann) && s.is_none() {
            return Err("two_map_picard_mann needs a mapping S".into());
        }
        if let Some(s) = &s {
            if s.domain() != t.domain() {
                return Err("domain mismatch between S and T".into());
            }
        }
        if self.stop.window == 0 || self.tolerances.window == 0 {
            return Err("windows must be at least 1".into());
        }
        Ok(())
    }

    /// Serialized form, suitable for re-loading.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

fn build_map(spec: &MapSpec, domain: &Domain) -> attractor_core::Result<Mapping> {
    Ok(Mapping::new(spec.family.clone(), domain.clone())?.with_self_map(spec.self_map))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: origin.clone(),
        source,
    })?;
    Scenario::from_json(&text, &origin)
}
