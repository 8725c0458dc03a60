//! Sampled verifiers for the hybrid-class inequalities.
//!
//! Every verdict is evidence on a finite pair set, never a proof: reports
//! carry [`Verdict::HoldsOnSample`] rather than a bare "holds".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Mapping;
use crate::error::{Error, Result};
use crate::geometry::{dist, dist_sq, norm, norm_sq, Point};

/// Coefficients of the quadratic hybrid inequalities.
///
/// The five-term inequality uses `alpha..epsilon`; the seven-term variant
/// additionally needs `varsigma` (weight of `‖y−Ty‖²`) and `eta` (weight of
/// `‖(x−Tx)−(y−Ty)‖²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varsigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl HybridParams {
    pub const fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, epsilon: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            varsigma: None,
            eta: None,
        }
    }

    pub const fn with_wide(mut self, varsigma: f64, eta: f64) -> Self {
        self.varsigma = Some(varsigma);
        self.eta = Some(eta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma, self.delta, self.epsilon];
        let extra = self.varsigma.iter().chain(self.eta.iter());
        if all.iter().chain(extra).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "hybrid parameters must be finite".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HybridClass {
    /// Normally generalized hybrid (four terms).
    Ngm,
    /// Widely more generalized hybrid (seven terms).
    Wmgm,
    /// Further generalized hybrid (five terms).
    Sgm,
    BerindeQuasiContractive,
    Nonexpansive,
    QuasiNonexpansive,
}

impl HybridClass {
    pub fn name(&self) -> &'static str {
        match self {
            HybridClass::Ngm => "ngm",
            HybridClass::Wmgm => "wmgm",
            HybridClass::Sgm => "sgm",
            HybridClass::BerindeQuasiContractive => "berinde-quasi-contractive",
            HybridClass::Nonexpansive => "nonexpansive",
            HybridClass::QuasiNonexpansive => "quasi-nonexpansive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsOnSample,
    Violated,
}

/// Outcome of a sampled class check.
///
/// `max_violation` is the largest positive left-hand side (0 if none);
/// `witness` is the pair that exceeds its tolerance by the most. For the
/// quasi-nonexpansive check the witness is `(x, z)` with `z` the fixed
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCheckReport {
    pub class: HybridClass,
    pub sampled: bool,
    pub pairs_tested: usize,
    pub max_violation: f64,
    pub witness: Option<(Point, Point)>,
    pub verdict: Verdict,
    pub tol: f64,
}

impl ClassCheckReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnSample
    }

    /// Combines reports over disjoint pair chunks.
    pub fn merge(self, other: ClassCheckReport) -> ClassCheckReport {
        let verdict = if self.holds() && other.holds() {
            Verdict::HoldsOnSample
        } else {
            Verdict::Violated
        };
        let pairs_tested = self.pairs_tested + other.pairs_tested;
        let (mut keep, drop) = match (self.verdict, other.verdict) {
            (Verdict::Violated, Verdict::HoldsOnSample) => (self, other),
            (Verdict::HoldsOnSample, Verdict::Violated) => (other, self),
            _ if other.max_violation > self.max_violation => (other, self),
            _ => (self, other),
        };
        keep.max_violation = keep.max_violation.max(drop.max_violation);
        keep.pairs_tested = pairs_tested;
        keep.verdict = verdict;
        keep
    }
}

/// The pairs `(x, y)` a class check ranges over.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSet {
    /// All ordered pairs of the points, including `x = y`.
    Grid(Vec<Point>),
    Explicit(Vec<(Point, Point)>),
}

impl PairSet {
    /// `count` seeded random ordered pairs drawn from `points`.
    pub fn random(points: &[Point], count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || points[rng.gen_range(0..points.len())].clone();
        PairSet::Explicit((0..count).map(|_| (pick(), pick())).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            PairSet::Grid(p) => p.len() * p.len(),
            PairSet::Explicit(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Evaluates the mapping once per distinct point and visits every pair
    /// as `(x, y, Tx, Ty)`.
    fn scan(
        &self,
        m: &Mapping,
        mut visit: impl FnMut(&Point, &Point, &Point, &Point) -> Result<()>,
    ) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Empty { what: "pair list" });
        }
        match self {
            PairSet::Grid(points) => {
                let images = points.iter().map(|x| m.eval(x)).collect::<Result<Vec<_>>>()?;
                for (x, tx) in points.iter().zip(&images) {
                    for (y, ty) in points.iter().zip(&images) {
                        visit(x, y, tx, ty)?;
                    }
                }
            }
            PairSet::Explicit(pairs) => {
                for (x, y) in pairs {
                    visit(x, y, &m.eval(x)?, &m.eval(y)?)?;
                }
            }
        }
        Ok(())
    }
}

/// Running maximum over pairs of a left-hand side that should be `≤ 0`.
struct Scan {
    class: HybridClass,
    tol: f64,
    pairs: usize,
    max_value: f64,
    worst_excess: f64,
    witness: Option<(Point, Point)>,
}

impl Scan {
    fn new(class: HybridClass, tol: f64) -> Self {
        Self {
            class,
            tol,
            pairs: 0,
            max_value: 0.0,
            worst_excess: f64::NEG_INFINITY,
            witness: None,
        }
    }

    /// Records `value` with admissible bound `tol * (1 + scale)`.
    fn record(&mut self, value: f64, scale: f64, x: &Point, y: &Point) {
        self.pairs += 1;
        let excess = value - self.tol * (1.0 + scale);
        if value > 0.0 && excess > self.worst_excess {
            self.worst_excess = excess;
            self.witness = Some((x.clone(), y.clone()));
        }
        if value > self.max_value {
            self.max_value = value;
        }
    }

    fn finish(self) -> ClassCheckReport {
        ClassCheckReport {
            class: self.class,
            sampled: true,
            pairs_tested: self.pairs,
            max_violation: self.max_value,
            verdict: if self.worst_excess > 0.0 {
                Verdict::Violated
            } else {
                Verdict::HoldsOnSample
            },
            witness: self.witness,
            tol: self.tol,
        }
    }
}

/// Squared distances entering the hybrid inequalities, in coefficient order
/// `α, β, γ, δ, ε, ς, η`.
fn hybrid_terms(x: &Point, y: &Point, tx: &Point, ty: &Point, terms: usize) -> Result<[f64; 7]> {
    let mut t = [0.0; 7];
    t[0] = dist_sq(tx, ty)?;
    t[1] = dist_sq(x, ty)?;
    t[2] = dist_sq(tx, y)?;
    t[3] = dist_sq(x, y)?;
    if terms > 4 {
        t[4] = dist_sq(x, tx)?;
    }
    if terms > 5 {
        t[5] = dist_sq(y, ty)?;
        t[6] = dist_sq(&x.sub(tx)?, &y.sub(ty)?)?;
    }
    Ok(t)
}

/// Left-to-right weighted sum, so that appending zero weights never
/// changes the value.
fn weighted(terms: &[f64; 7], coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .zip(terms)
        .fold(0.0, |acc, (c, t)| acc + c * t)
}

fn coefficients(class: HybridClass, p: &HybridParams) -> Result<Vec<f64>> {
    p.validate()?;
    Ok(match class {
        HybridClass::Ngm => vec![p.alpha, p.beta, p.gamma, p.delta],
        HybridClass::Sgm => vec![p.alpha, p.beta, p.gamma, p.delta, p.epsilon],
        HybridClass::Wmgm => vec![
            p.alpha,
            p.beta,
            p.gamma,
            p.delta,
            p.epsilon,
            p.varsigma.ok_or(Error::MissingParameter("varsigma"))?,
            p.eta.ok_or(Error::MissingParameter("eta"))?,
        ],
        other => {
            return Err(Error::InvalidArgument(format!(
                "{} is not a quadratic hybrid class",
                other.name()
            )))
        }
    })
}

fn quadratic_check(
    class: HybridClass,
    m: &Mapping,
    p: &HybridParams,
    pairs: &PairSet,
    tol: f64,
) -> Result<ClassCheckReport> {
    let coeffs = coefficients(class, p)?;
    let mut scan = Scan::new(class, tol);
    pairs.scan(m, |x, y, tx, ty| {
        let value = weighted(&hybrid_terms(x, y, tx, ty, coeffs.len())?, &coeffs);
        scan.record(value, norm_sq(x) + norm_sq(y), x, y);
        Ok(())
    })?;
    Ok(scan.finish())
}

/// Per-pair left-hand sides in scan order, for value-for-value comparisons.
pub fn hybrid_lhs_values(
    class: HybridClass,
    m: &Mapping,
    p: &HybridParams,
    pairs: &PairSet,
) -> Result<Vec<f64>> {
    let coeffs = coefficients(class, p)?;
    let mut out = Vec::with_capacity(pairs.len());
    pairs.scan(m, |x, y, tx, ty| {
        out.push(weighted(&hybrid_terms(x, y, tx, ty, coeffs.len())?, &coeffs));
        Ok(())
    })?;
    Ok(out)
}

/// `α‖Tx−Ty‖² + β‖x−Ty‖² + γ‖Tx−y‖² + δ‖x−y‖² + ε‖x−Tx‖² ≤ 0` on `pairs`.
///
/// A pair violates when its left side exceeds `tol·(1 + ‖x‖² + ‖y‖²)`.
pub fn check_further_hybrid(
    m: &Mapping,
    p: &HybridParams,
    pairs: &PairSet,
    tol: f64,
) -> Result<ClassCheckReport> {
    quadratic_check(HybridClass::Sgm, m, p, pairs, tol)
}

/// The four-term inequality; `epsilon` is ignored.
pub fn check_normally_hybrid(
    m: &Mapping,
    p: &HybridParams,
    pairs: &PairSet,
    tol: f64,
) -> Result<ClassCheckReport> {
    quadratic_check(HybridClass::Ngm, m, p, pairs, tol)
}

/// The seven-term inequality; `varsigma` and `eta` must be present.
pub fn check_widely_more_hybrid(
    m: &Mapping,
    p: &HybridParams,
    pairs: &PairSet,
    tol: f64,
) -> Result<ClassCheckReport> {
    quadratic_check(HybridClass::Wmgm, m, p, pairs, tol)
}

/// `‖Tx−Ty‖ ≤ ‖x−y‖` on `pairs`.
pub fn check_nonexpansive(m: &Mapping, pairs: &PairSet, tol: f64) -> Result<ClassCheckReport> {
    let mut scan = Scan::new(HybridClass::Nonexpansive, tol);
    pairs.scan(m, |x, y, tx, ty| {
        scan.record(dist(tx, ty)? - dist(x, y)?, norm(x) + norm(y), x, y);
        Ok(())
    })?;
    Ok(scan.finish())
}

/// `‖Tx−Ty‖ ≤ a‖x−y‖ + L‖x−Tx‖` on `pairs`.
pub fn check_berinde(
    m: &Mapping,
    contraction: f64,
    residual_weight: f64,
    pairs: &PairSet,
    tol: f64,
) -> Result<ClassCheckReport> {
    if !(contraction > 0.0 && contraction < 1.0) || !(residual_weight >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "berinde certificate needs a in (0,1) and L >= 0, got ({contraction}, {residual_weight})"
        )));
    }
    let mut scan = Scan::new(HybridClass::BerindeQuasiContractive, tol);
    pairs.scan(m, |x, y, tx, ty| {
        let value =
            dist(tx, ty)? - contraction * dist(x, y)? - residual_weight * dist(x, tx)?;
        scan.record(value, norm(x) + norm(y), x, y);
        Ok(())
    })?;
    Ok(scan.finish())
}

/// `‖Tx−z‖ ≤ ‖x−z‖` for every sample `x` and every listed fixed point `z`.
///
/// A listed point that is not a fixed point (residual above `tol`) is a
/// setup error, not a class violation.
pub fn check_quasi_nonexpansive(
    m: &Mapping,
    fixed_points: &[Point],
    sample: &[Point],
    tol: f64,
) -> Result<ClassCheckReport> {
    if fixed_points.is_empty() {
        return Err(Error::Empty {
            what: "fixed point list",
        });
    }
    if sample.is_empty() {
        return Err(Error::Empty { what: "sample" });
    }
    for z in fixed_points {
        let residual = dist(&m.eval(z)?, z)?;
        if residual > tol {
            return Err(Error::NotAFixedPoint {
                point: z.clone(),
                residual,
                tol,
            });
        }
    }
    let images = sample.iter().map(|x| m.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut scan = Scan::new(HybridClass::QuasiNonexpansive, tol);
    for z in fixed_points {
        for (x, tx) in sample.iter().zip(&images) {
            // scale 0: the bound is the absolute tolerance on distances
            scan.record(dist(tx, z)? - dist(x, z)?, 0.0, x, z);
        }
    }
    Ok(scan.finish())
}

/// Whether parameters satisfy the existence and convergence hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConditions {
    pub holds: bool,
    /// The first failing condition.
    pub reason: Option<String>,
}

/// `α+β+γ+δ ≥ 0`, `ε ≥ 0`, and `α+β > 0` or `α+γ > 0`, checked in that
/// order.
pub fn check_theorem_conditions(p: &HybridParams) -> TheoremConditions {
    let fail = |reason: &str| TheoremConditions {
        holds: false,
        reason: Some(reason.to_string()),
    };
    if !(p.alpha + p.beta + p.gamma + p.delta >= 0.0) {
        return fail("α+β+γ+δ ≥ 0 fails");
    }
    if !(p.epsilon >= 0.0) {
        return fail("ε ≥ 0 fails");
    }
    if !(p.alpha + p.beta > 0.0 || p.alpha + p.gamma > 0.0) {
        return fail("neither α+β>0 nor α+γ>0");
    }
    TheoremConditions {
        holds: true,
        reason: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{Domain, Family};
    use std::f64::consts::PI;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn on_unit_interval(family: Family) -> Mapping {
        Mapping::new(family, Domain::interval(-1.0, 1.0)).unwrap()
    }

    fn grid41() -> PairSet {
        PairSet::Grid(Domain::interval(-1.0, 1.0).grid(41).unwrap())
    }

    /// Closed form of the five-term left side for `x ↦ c x` on a pair.
    fn scale_lhs_oracle(c: f64, q: &HybridParams, x: f64, y: f64) -> f64 {
        q.alpha * (c * x - c * y).powi(2)
            + q.beta * (x - c * y).powi(2)
            + q.gamma * (c * x - y).powi(2)
            + q.delta * (x - y).powi(2)
            + q.epsilon * (x - c * x).powi(2)
    }

    #[test]
    fn contraction_embedding_is_exactly_zero() {
        let m = on_unit_interval(Family::Scale { factor: 0.5 });
        let q = HybridParams::new(1.0, 0.0, 0.0, -0.25, 0.0);
        let report = check_further_hybrid(&m, &q, &grid41(), 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnSample);
        assert_eq!(report.max_violation, 0.0);
        assert_eq!(report.pairs_tested, 41 * 41);
        assert!(report.witness.is_none());
        assert!(report.sampled);

        // the grid oracle agrees with the closed form pair by pair
        let values = hybrid_lhs_values(HybridClass::Sgm, &m, &q, &grid41()).unwrap();
        let g = linspace_1d();
        let mut k = 0;
        for &x in &g {
            for &y in &g {
                assert!((values[k] - scale_lhs_oracle(0.5, &q, x, y)).abs() < 1e-15);
                k += 1;
            }
        }
    }

    fn linspace_1d() -> Vec<f64> {
        crate::mappings::linspace(-1.0, 1.0, 41)
    }

    #[test]
    fn identity_is_trivially_hybrid() {
        let m = on_unit_interval(Family::Identity);
        let q = HybridParams::new(1.0, 0.0, 0.0, -1.0, 0.0);
        assert!(check_further_hybrid(&m, &q, &grid41(), 1e-9).unwrap().holds());
        let wide = q.with_wide(0.0, 0.0);
        assert!(check_widely_more_hybrid(&m, &wide, &grid41(), 1e-9).unwrap().holds());
    }

    #[test]
    fn expansive_pair_is_a_witness() {
        let m = on_unit_interval(Family::Scale { factor: 2.0 }).into_space();
        let q = HybridParams::new(1.0, 0.0, 0.0, -1.0, 0.0);
        let pairs = PairSet::Explicit(vec![(p(&[1.0]), p(&[0.0]))]);
        let report = check_further_hybrid(&m, &q, &pairs, 1e-9).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        assert_eq!(report.witness, Some((p(&[1.0]), p(&[0.0]))));
        assert_eq!(report.max_violation, 3.0);
        let ngm = check_normally_hybrid(&m, &q, &pairs, 1e-9).unwrap();
        assert_eq!(ngm.verdict, Verdict::Violated);
    }

    #[test]
    fn reductions_are_value_for_value() {
        let m = on_unit_interval(Family::Scale { factor: 0.7 });
        let q = HybridParams::new(0.8, 0.3, -0.2, -0.6, 0.0);
        let ngm = hybrid_lhs_values(HybridClass::Ngm, &m, &q, &grid41()).unwrap();
        let sgm = hybrid_lhs_values(HybridClass::Sgm, &m, &q, &grid41()).unwrap();
        let wmgm =
            hybrid_lhs_values(HybridClass::Wmgm, &m, &q.with_wide(0.0, 0.0), &grid41()).unwrap();
        assert_eq!(ngm, sgm);
        assert_eq!(sgm, wmgm);
        assert_eq!(
            check_normally_hybrid(&m, &q, &grid41(), 1e-9).unwrap().max_violation,
            check_further_hybrid(&m, &q, &grid41(), 1e-9).unwrap().max_violation
        );
    }

    #[test]
    fn translation_has_constant_displacement() {
        let m = Mapping::new(
            Family::Translation { offset: p(&[0.3]) },
            Domain::interval(-1.0, 1.0),
        )
        .unwrap()
        .into_space();
        let q = HybridParams::new(0.0, 0.0, 0.0, 0.0, 0.0).with_wide(0.0, 1.0);
        let report = check_widely_more_hybrid(&m, &q, &grid41(), 1e-9).unwrap();
        assert!(report.holds());
        assert!(report.max_violation < 1e-15);
    }

    #[test]
    fn wide_check_needs_extra_parameters() {
        let m = on_unit_interval(Family::Identity);
        let q = HybridParams::new(1.0, 0.0, 0.0, -1.0, 0.0);
        assert_eq!(
            check_widely_more_hybrid(&m, &q, &grid41(), 1e-9).unwrap_err(),
            Error::MissingParameter("varsigma")
        );
    }

    #[test]
    fn empty_pairs_are_an_error() {
        let m = on_unit_interval(Family::Identity);
        let q = HybridParams::new(1.0, 0.0, 0.0, -1.0, 0.0);
        assert!(matches!(
            check_further_hybrid(&m, &q, &PairSet::Explicit(vec![]), 1e-9),
            Err(Error::Empty { .. })
        ));
    }

    #[test]
    fn theorem_conditions_examples() {
        let ok = check_theorem_conditions(&HybridParams::new(1.0, 0.0, 0.0, -0.25, 0.0));
        assert!(ok.holds && ok.reason.is_none());
        let eps = check_theorem_conditions(&HybridParams::new(1.0, 0.0, 0.0, -1.0, -0.5));
        assert_eq!(eps.reason.as_deref(), Some("ε ≥ 0 fails"));
        let zero = check_theorem_conditions(&HybridParams::new(0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(zero.reason.as_deref(), Some("neither α+β>0 nor α+γ>0"));
        let neg = check_theorem_conditions(&HybridParams::new(1.0, 0.0, 0.0, -2.0, 0.0));
        assert_eq!(neg.reason.as_deref(), Some("α+β+γ+δ ≥ 0 fails"));
    }

    #[test]
    fn quasi_nonexpansive_examples() {
        let sample = Domain::interval(-1.0, 1.0).grid(41).unwrap();
        let half = on_unit_interval(Family::Scale { factor: 0.5 });
        assert!(check_quasi_nonexpansive(&half, &[p(&[0.0])], &sample, 1e-9)
            .unwrap()
            .holds());

        let ball = Domain::Ball {
            center: p(&[0.0, 0.0]),
            radius: 1.0,
        };
        let rot = Mapping::new(Family::Rotation2d { angle: 0.9 }, ball.clone()).unwrap();
        assert!(check_quasi_nonexpansive(&rot, &[p(&[0.0, 0.0])], &ball.grid(15).unwrap(), 1e-9)
            .unwrap()
            .holds());

        let double = on_unit_interval(Family::Scale { factor: 2.0 }).into_space();
        let r = check_quasi_nonexpansive(&double, &[p(&[0.0])], &[p(&[1.0])], 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.witness, Some((p(&[1.0]), p(&[0.0]))));

        assert!(matches!(
            check_quasi_nonexpansive(&half, &[p(&[0.5])], &sample, 1e-9),
            Err(Error::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn berinde_certificate_holds_but_map_is_expansive_somewhere() {
        let m = Mapping::new(
            Family::Berinde {
                contraction: 0.5,
                residual_weight: 1.0,
            },
            Domain::interval(0.0, 1.0),
        )
        .unwrap();
        let grid = PairSet::Grid(Domain::interval(0.0, 1.0).grid(201).unwrap());
        let cert = check_berinde(&m, 0.5, 1.0, &grid, 1e-12).unwrap();
        assert!(cert.holds(), "{cert:?}");
        let ne = check_nonexpansive(&m, &grid, 1e-9).unwrap();
        assert_eq!(ne.verdict, Verdict::Violated);
        // squared certificate: ‖Tx−Ty‖² ≤ 2a²‖x−y‖² + 2L²‖x−Tx‖²
        let sq = HybridParams::new(1.0, 0.0, 0.0, -0.5, -2.0);
        assert!(check_further_hybrid(&m, &sq, &grid, 1e-12).unwrap().holds());
        let ngm_fails = check_normally_hybrid(&m, &HybridParams::new(1.0, 0.0, 0.0, -0.99, 0.0), &grid, 1e-9)
            .unwrap();
        assert_eq!(ngm_fails.verdict, Verdict::Violated);
    }

    #[test]
    fn rotations_are_isometries() {
        let ball = Domain::Ball {
            center: p(&[0.0, 0.0]),
            radius: 1.0,
        };
        let rot = Mapping::new(Family::Rotation2d { angle: PI / 5.0 }, ball.clone()).unwrap();
        let pairs = PairSet::Grid(ball.grid(9).unwrap());
        let q = HybridParams::new(1.0, 0.0, 0.0, -1.0, 0.0);
        let r = check_further_hybrid(&rot, &q, &pairs, 1e-9).unwrap();
        assert!(r.holds() && r.max_violation < 1e-14);
    }

    #[test]
    fn merge_keeps_worst_chunk() {
        let m = on_unit_interval(Family::Scale { factor: 2.0 }).into_space();
        let q = HybridParams::new(1.0, 0.0, 0.0, -1.0, 0.0);
        let a = check_further_hybrid(&m, &q, &PairSet::Explicit(vec![(p(&[0.0]), p(&[0.0]))]), 1e-9)
            .unwrap();
        let b = check_further_hybrid(&m, &q, &PairSet::Explicit(vec![(p(&[1.0]), p(&[0.0]))]), 1e-9)
            .unwrap();
        let merged = a.merge(b.clone());
        assert_eq!(merged.pairs_tested, 2);
        assert_eq!(merged.verdict, Verdict::Violated);
        assert_eq!(merged.witness, b.witness);
    }

    #[test]
    fn random_pairs_are_seeded() {
        let pts = Domain::interval(-1.0, 1.0).grid(41).unwrap();
        assert_eq!(PairSet::random(&pts, 30, 5), PairSet::random(&pts, 30, 5));
    }
}
