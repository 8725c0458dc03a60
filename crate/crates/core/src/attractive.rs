//! Attractive and common attractive points.
//!
//! `A(T) = {z : ‖Tx−z‖ ≤ ‖x−z‖ for all x ∈ C}` and
//! `CAP(S,T) = {z : max(‖Sx−z‖, ‖Tx−z‖) ≤ ‖x−z‖ for all x ∈ C}`.
//! The quantifier over `C` is replaced by a finite domain sample, so
//! every "member" below means "member on that sample".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::ConvexSet;
use crate::error::{Error, Result};
use crate::geometry::{dist, norm, Point};
use crate::mappings::{check_quasi_nonexpansive, Mapping};

/// Result of a sampled membership test.
///
/// `max_excess` is `max_x (‖Tx−z‖ − ‖x−z‖)` over the sample and `witness`
/// the first sample point attaining it, whether or not `z` is a member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub witness: Point,
    pub max_excess: f64,
    pub sample_size: usize,
    pub tol: f64,
}

/// Images of a domain sample under one or two mappings, reusable across
/// many candidate points.
struct Attraction<'a> {
    sample: &'a [Point],
    images: Vec<Vec<Point>>,
}

impl<'a> Attraction<'a> {
    fn new(maps: &[&Mapping], sample: &'a [Point]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Empty {
                what: "domain sample",
            });
        }
        if let [s, t] = maps {
            if s.domain() != t.domain() {
                return Err(Error::DomainMismatch(format!(
                    "S acts on {}, T acts on {}",
                    s.domain(),
                    t.domain()
                )));
            }
        }
        let images = maps
            .iter()
            .map(|m| sample.iter().map(|x| m.eval(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sample, images })
    }

    fn test(&self, z: &Point, tol: f64) -> Result<Membership> {
        let mut worst = (f64::NEG_INFINITY, 0);
        for (i, x) in self.sample.iter().enumerate() {
            let mut reach = f64::NEG_INFINITY;
            for images in &self.images {
                reach = reach.max(dist(&images[i], z)?);
            }
            let excess = reach - dist(x, z)?;
            if excess > worst.0 {
                worst = (excess, i);
            }
        }
        Ok(Membership {
            member: worst.0 <= tol,
            witness: self.sample[worst.1].clone(),
            max_excess: worst.0,
            sample_size: self.sample.len(),
            tol,
        })
    }
}

/// Whether `‖Tx−z‖ ≤ ‖x−z‖ + tol` for every `x` in `sample`.
pub fn is_attractive_point(
    m: &Mapping,
    z: &Point,
    sample: &[Point],
    tol: f64,
) -> Result<Membership> {
    Attraction::new(&[m], sample)?.test(z, tol)
}

/// Whether `max(‖Sx−z‖, ‖Tx−z‖) ≤ ‖x−z‖ + tol` for every `x` in `sample`.
///
/// Both mappings must act on the same domain.
pub fn is_common_attractive(
    s: &Mapping,
    t: &Mapping,
    z: &Point,
    sample: &[Point],
    tol: f64,
) -> Result<Membership> {
    Attraction::new(&[s, t], sample)?.test(z, tol)
}

/// Candidates that passed the common-attractive test, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapEstimate {
    pub members: Vec<Point>,
    pub candidates_tested: usize,
    pub domain_sample_size: usize,
    pub tol: f64,
}

/// Filters `candidates` through [`is_common_attractive`].
pub fn estimate_cap_region(
    s: &Mapping,
    t: &Mapping,
    sample: &[Point],
    candidates: &[Point],
    tol: f64,
) -> Result<CapEstimate> {
    if candidates.is_empty() {
        return Err(Error::Empty {
            what: "candidate grid",
        });
    }
    let attraction = Attraction::new(&[s, t], sample)?;
    let mut members = Vec::new();
    for z in candidates {
        if attraction.test(z, tol)?.member {
            members.push(z.clone());
        }
    }
    Ok(CapEstimate {
        members,
        candidates_tested: candidates.len(),
        domain_sample_size: sample.len(),
        tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationFailure {
    pub u: Point,
    pub v: Point,
    pub lambda: f64,
    pub point: Point,
}

/// Outcome of [`check_convexity_of_membership`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub trials: usize,
    pub closedness_trials: usize,
    pub convexity_failures: Vec<CombinationFailure>,
    /// Limits of member sequences that were not members.
    pub closedness_failures: Vec<CombinationFailure>,
    pub seed: u64,
    pub tol: f64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.convexity_failures.is_empty() && self.closedness_failures.is_empty()
    }
}

const CLOSEDNESS_TERMS: i32 = 8;

/// Tests a membership predicate for convexity and closedness on random
/// combinations of known members.
///
/// Convexity: `pred(λu + (1−λ)v)` for seeded member pairs and `λ ∈ (0,1)`.
/// Closedness: along `u + λ_k (v−u)` with `λ_k = λ* + (1−λ*)2^-k`, if every
/// term is a member then so must be the limit `u + λ*(v−u)`.
pub fn check_convexity_of_membership(
    pred: impl Fn(&Point, f64) -> Result<bool>,
    members: &[Point],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<ConvexityReport> {
    if members.is_empty() {
        return Err(Error::Empty { what: "member list" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| {
        let u = &members[rng.gen_range(0..members.len())];
        let v = &members[rng.gen_range(0..members.len())];
        (u, v, rng.gen_range(f64::EPSILON..1.0))
    };
    // u + λ(v−u) is λv + (1−λ)u
    let blend = |u: &Point, v: &Point, lambda: f64| -> Result<Point> {
        u.add_scaled(lambda, &v.sub(u)?)
    };

    let mut convexity_failures = Vec::new();
    for _ in 0..trials {
        let (u, v, lambda) = pick(&mut rng);
        let point = blend(u, v, lambda)?;
        if !pred(&point, tol)? {
            convexity_failures.push(CombinationFailure {
                u: u.clone(),
                v: v.clone(),
                lambda,
                point,
            });
        }
    }

    let closedness_trials = trials.div_ceil(10);
    let mut closedness_failures = Vec::new();
    for _ in 0..closedness_trials {
        let (u, v, lambda) = pick(&mut rng);
        let mut sequence_inside = true;
        for k in 1..=CLOSEDNESS_TERMS {
            let lk = lambda + (1.0 - lambda) * 0.5f64.powi(k);
            if !pred(&blend(u, v, lk)?, tol)? {
                sequence_inside = false;
                break;
            }
        }
        let limit = blend(u, v, lambda)?;
        if sequence_inside && !pred(&limit, tol)? {
            closedness_failures.push(CombinationFailure {
                u: u.clone(),
                v: v.clone(),
                lambda,
                point: limit,
            });
        }
    }

    Ok(ConvexityReport {
        trials,
        closedness_trials,
        convexity_failures,
        closedness_failures,
        seed,
        tol,
    })
}

/// `u = P_C z`, checked to be a common fixed point of `S` and `T`.
///
/// A residual above `tol` is an error carrying both residuals.
pub fn cap_fixed_point_bridge(
    s: &Mapping,
    t: &Mapping,
    z: &Point,
    c: &ConvexSet,
    tol: f64,
) -> Result<Point> {
    let u = c.project(z)?;
    let residual_s = dist(&s.eval(&u)?, &u)?;
    let residual_t = dist(&t.eval(&u)?, &u)?;
    if residual_s > tol || residual_t > tol {
        return Err(Error::BridgeResidual {
            point: u,
            residual_s,
            residual_t,
            tol,
        });
    }
    Ok(u)
}

/// A sampled point of `CAP ∩ C` that is not a common fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualFailure {
    pub point: Point,
    pub residual_s: f64,
    pub residual_t: f64,
}

/// Both inclusions of `CAP(S,T) ∩ C = F(S) ∩ F(T)` on a sample of `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Whether both maps passed the quasi-nonexpansive check against the
    /// listed fixed points; the identity is only expected under it.
    pub quasi_nonexpansive: bool,
    pub cap_in_c: Vec<Point>,
    pub forward_failures: Vec<ResidualFailure>,
    /// Listed common fixed points that failed the membership test.
    pub backward_failures: Vec<Point>,
    pub sample_size: usize,
    pub tol: f64,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.forward_failures.is_empty() && self.backward_failures.is_empty()
    }
}

/// Samples `CAP ∩ C` from `c_sample` (which is also the domain sample) and
/// compares it with the listed common fixed points.
pub fn check_cap_fixedpoint_equivalence(
    s: &Mapping,
    t: &Mapping,
    c_sample: &[Point],
    fixed_points: &[Point],
    tol: f64,
) -> Result<EquivalenceReport> {
    let quasi_nonexpansive = match (
        check_quasi_nonexpansive(s, fixed_points, c_sample, tol),
        check_quasi_nonexpansive(t, fixed_points, c_sample, tol),
    ) {
        (Ok(a), Ok(b)) => a.holds() && b.holds(),
        (Err(Error::NotAFixedPoint { .. }), _) | (_, Err(Error::NotAFixedPoint { .. })) => false,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let attraction = Attraction::new(&[s, t], c_sample)?;

    let mut cap_in_c = Vec::new();
    let mut forward_failures = Vec::new();
    for z in c_sample {
        if !attraction.test(z, tol)?.member {
            continue;
        }
        cap_in_c.push(z.clone());
        let residual_s = dist(&s.eval(z)?, z)?;
        let residual_t = dist(&t.eval(z)?, z)?;
        if residual_s > tol || residual_t > tol {
            forward_failures.push(ResidualFailure {
                point: z.clone(),
                residual_s,
                residual_t,
            });
        }
    }

    let mut backward_failures = Vec::new();
    for p in fixed_points {
        if !attraction.test(p, tol)?.member {
            backward_failures.push(p.clone());
        }
    }

    Ok(EquivalenceReport {
        quasi_nonexpansive,
        cap_in_c,
        forward_failures,
        backward_failures,
        sample_size: c_sample.len(),
        tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orbit {
    S,
    T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum OrbitVerdict {
    BoundedAtHorizon,
    /// `step` counts applications of the map; step 0 is the start.
    Exceeded { orbit: Orbit, step: usize, norm: f64 },
}

/// Finite-horizon view of the boundedness of `{Sⁿz}` and `{Tⁿz}`.
///
/// Bounded-at-horizon is evidence only: the property is asymptotic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub start: Point,
    pub horizon: usize,
    pub bound: f64,
    pub max_norm_s: f64,
    pub max_norm_t: f64,
    pub verdict: OrbitVerdict,
}

impl OrbitReport {
    pub fn bounded(&self) -> bool {
        self.verdict == OrbitVerdict::BoundedAtHorizon
    }
}

pub const DEFAULT_ORBIT_HORIZON: usize = 10_000;

/// `10⁶ (1 + ‖z‖)`.
pub fn default_orbit_bound(z: &Point) -> f64 {
    1e6 * (1.0 + norm(z))
}

/// Iterates `S` and `T` from `z` separately, stopping at the first norm
/// above `bound` (the `S` orbit is inspected first at each step).
pub fn orbit_bounded(
    s: &Mapping,
    t: &Mapping,
    z: &Point,
    horizon: usize,
    bound: f64,
) -> Result<OrbitReport> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("orbit horizon must be at least 1".into()));
    }
    if !(bound > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "orbit bound must be positive, got {bound}"
        )));
    }
    let start = norm(z);
    let mut orbit = [z.clone(), z.clone()];
    let mut max_norm = [start, start];
    let report = |max_norm: [f64; 2], verdict| OrbitReport {
        start: z.clone(),
        horizon,
        bound,
        max_norm_s: max_norm[0],
        max_norm_t: max_norm[1],
        verdict,
    };
    if start > bound {
        let verdict = OrbitVerdict::Exceeded {
            orbit: Orbit::S,
            step: 0,
            norm: start,
        };
        return Ok(report(max_norm, verdict));
    }
    let maps = [(Orbit::S, s, "S^n z"), (Orbit::T, t, "T^n z")];
    for step in 1..=horizon {
        for (k, &(which, m, label)) in maps.iter().enumerate() {
            let x = &orbit[k];
            if !m.domain().contains_default(x)? {
                return Err(Error::LeftDomain {
                    step: step - 1,
                    which: label,
                    point: x.clone(),
                    domain: m.domain().to_string(),
                });
            }
            orbit[k] = m.eval(x)?;
            let n = norm(&orbit[k]);
            max_norm[k] = max_norm[k].max(n);
            if !(n <= bound) {
                let verdict = OrbitVerdict::Exceeded {
                    orbit: which,
                    step,
                    norm: n,
                };
                return Ok(report(max_norm, verdict));
            }
        }
    }
    Ok(report(max_norm, OrbitVerdict::BoundedAtHorizon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{linspace, Domain, Family};
    use std::f64::consts::PI;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn map(family: Family, domain: Domain) -> Mapping {
        Mapping::new(family, domain).unwrap()
    }

    fn unit() -> Domain {
        Domain::interval(0.0, 1.0)
    }

    fn zero_map() -> Mapping {
        map(Family::Constant { point: p(&[0.0]) }, unit())
    }

    fn line(lo: f64, hi: f64, n: usize) -> Vec<Point> {
        linspace(lo, hi, n).into_iter().map(|v| p(&[v])).collect()
    }

    #[test]
    fn identity_attracts_everything() {
        let id = Mapping::identity(unit()).unwrap();
        let sample = unit().grid(11).unwrap();
        for z in line(-3.0, 3.0, 13) {
            let r = is_attractive_point(&id, &z, &sample, 0.0).unwrap();
            assert!(r.member);
            assert_eq!(r.max_excess, 0.0);
        }
    }

    #[test]
    fn constant_map_attracts_the_nonpositive_halfline() {
        // |0−z| ≤ |x−z| for all x ∈ [0,1]; x = z rules out every z > 0
        let sample = unit().grid(101).unwrap();
        let t = zero_map();
        assert!(is_attractive_point(&t, &p(&[0.0]), &sample, 1e-12).unwrap().member);
        assert!(is_attractive_point(&t, &p(&[-0.4]), &sample, 1e-12).unwrap().member);
        let r = is_attractive_point(&t, &p(&[0.25]), &sample, 1e-12).unwrap();
        assert!(!r.member);
        assert_eq!(r.witness, p(&[0.25]));
        assert_eq!(r.max_excess, 0.25);
        let r = is_attractive_point(&t, &p(&[0.75]), &sample, 1e-12).unwrap();
        assert!(!r.member);
        assert_eq!(r.witness, p(&[0.75]));
    }

    #[test]
    fn scale_half_attracts_origin() {
        let d = Domain::interval(-1.0, 1.0);
        let t = map(Family::Scale { factor: 0.5 }, d.clone());
        let r = is_attractive_point(&t, &p(&[0.0]), &d.grid(41).unwrap(), 0.0).unwrap();
        assert!(r.member);
    }

    #[test]
    fn common_reductions() {
        let d = Domain::interval(-1.0, 1.0);
        let sample = d.grid(41).unwrap();
        let t = map(Family::Scale { factor: 0.5 }, d.clone());
        let id = Mapping::identity(d.clone()).unwrap();
        for z in line(-2.0, 2.0, 81) {
            let single = is_attractive_point(&t, &z, &sample, 1e-9).unwrap();
            assert_eq!(is_common_attractive(&t, &t, &z, &sample, 1e-9).unwrap(), single);
            assert_eq!(
                is_common_attractive(&id, &t, &z, &sample, 1e-9).unwrap().member,
                single.member
            );
        }
    }

    #[test]
    fn two_map_example() {
        let sample = unit().grid(101).unwrap();
        let t = map(Family::Scale { factor: 0.5 }, unit());
        let r = is_common_attractive(&zero_map(), &t, &p(&[0.0]), &sample, 0.0).unwrap();
        assert!(r.member);
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let s = map(Family::Identity, unit());
        let t = map(Family::Identity, Domain::interval(-1.0, 1.0));
        assert!(matches!(
            is_common_attractive(&s, &t, &p(&[0.0]), &unit().grid(5).unwrap(), 0.0),
            Err(Error::DomainMismatch(_))
        ));
        assert!(matches!(
            is_attractive_point(&s, &p(&[0.0]), &[], 0.0),
            Err(Error::Empty { .. })
        ));
    }

    #[test]
    fn region_estimates() {
        let sample = unit().grid(101).unwrap();
        let candidates = line(-1.0, 1.0, 101);
        let t = zero_map();
        let est = estimate_cap_region(&t, &t, &sample, &candidates, 1e-12).unwrap();
        assert_eq!(est.candidates_tested, 101);
        assert_eq!(est.domain_sample_size, 101);
        assert!(est.members.iter().all(|z| z.coords()[0] <= 0.0));
        assert_eq!(est.members.len(), 51);

        let id = Mapping::identity(unit()).unwrap();
        let all = estimate_cap_region(&id, &id, &sample, &candidates, 0.0).unwrap();
        assert_eq!(all.members, candidates);

        let d = Domain::interval(-1.0, 1.0);
        let double = map(Family::Scale { factor: 2.0 }, d.clone()).into_space();
        let away: Vec<Point> = candidates
            .iter()
            .filter(|z| z.coords()[0].abs() > 0.05)
            .cloned()
            .collect();
        let none = estimate_cap_region(&double, &double, &d.grid(41).unwrap(), &away, 1e-9).unwrap();
        assert!(none.members.is_empty());
    }

    #[test]
    fn convexity_checker() {
        let sample = unit().grid(101).unwrap();
        let t = zero_map();
        let members = estimate_cap_region(&t, &t, &sample, &line(-1.0, 1.0, 101), 1e-12)
            .unwrap()
            .members;
        let pred = |z: &Point, tol: f64| Ok(is_attractive_point(&t, z, &sample, tol)?.member);
        let r = check_convexity_of_membership(pred, &members, 500, 7, 1e-8).unwrap();
        assert!(r.passed(), "{r:?}");

        let single = check_convexity_of_membership(pred, &members[..1], 50, 7, 1e-8).unwrap();
        assert!(single.passed());

        let two = [p(&[0.0]), p(&[1.0])];
        let adversarial = |z: &Point, tol: f64| Ok(two.iter().any(|m| dist(m, z).unwrap() <= tol));
        let bad = check_convexity_of_membership(adversarial, &two, 50, 7, 1e-8).unwrap();
        assert!(!bad.convexity_failures.is_empty());
    }

    #[test]
    fn bridge_examples() {
        let c = ConvexSet::bounding_box(p(&[0.0]), p(&[1.0])).unwrap();
        let half = map(Family::Scale { factor: 0.5 }, unit());
        assert_eq!(
            cap_fixed_point_bridge(&half, &half, &p(&[-0.3]), &c, 1e-9).unwrap(),
            p(&[0.0])
        );
        assert_eq!(
            cap_fixed_point_bridge(&zero_map(), &half, &p(&[-1.0]), &c, 1e-9).unwrap(),
            p(&[0.0])
        );
        let id = Mapping::identity(unit()).unwrap();
        assert_eq!(
            cap_fixed_point_bridge(&id, &id, &p(&[0.6]), &c, 0.0).unwrap(),
            p(&[0.6])
        );
        match cap_fixed_point_bridge(&half, &half, &p(&[0.8]), &c, 1e-9) {
            Err(Error::BridgeResidual {
                residual_s,
                residual_t,
                ..
            }) => {
                assert!((residual_s - 0.4).abs() < 1e-15);
                assert_eq!(residual_s, residual_t);
            }
            other => panic!("expected a residual error, got {other:?}"),
        }
    }

    #[test]
    fn equivalence_examples() {
        let d = Domain::interval(-1.0, 1.0);
        let half = map(Family::Scale { factor: 0.5 }, d.clone());
        let r = check_cap_fixedpoint_equivalence(&half, &half, &d.grid(41).unwrap(), &[p(&[0.0])], 1e-9)
            .unwrap();
        assert!(r.passed() && r.quasi_nonexpansive);
        assert_eq!(r.cap_in_c, vec![p(&[0.0])]);

        let ball = Domain::Ball {
            center: p(&[0.0, 0.0]),
            radius: 1.0,
        };
        let s = map(Family::Rotation2d { angle: PI / 3.0 }, ball.clone());
        let t = map(Family::Rotation2d { angle: PI / 5.0 }, ball.clone());
        let r = check_cap_fixedpoint_equivalence(&s, &t, &ball.grid(21).unwrap(), &[p(&[0.0, 0.0])], 1e-9)
            .unwrap();
        assert!(r.passed());
        assert_eq!(r.cap_in_c, vec![p(&[0.0, 0.0])]);

        let id = Mapping::identity(d.clone()).unwrap();
        let sample = d.grid(11).unwrap();
        let all = check_cap_fixedpoint_equivalence(&id, &id, &sample, &sample, 0.0).unwrap();
        assert!(all.passed());
        assert_eq!(all.cap_in_c, sample);
    }

    #[test]
    fn orbit_examples() {
        let d = Domain::interval(-1.0, 1.0);
        let half = map(Family::Scale { factor: 0.5 }, d.clone());
        let r = orbit_bounded(&half, &half, &p(&[1.0]), 100, 10.0).unwrap();
        assert!(r.bounded());
        assert_eq!((r.max_norm_s, r.max_norm_t), (1.0, 1.0));

        let line = Domain::real_line(-1.0, 1.0);
        let double = map(Family::Scale { factor: 2.0 }, line);
        let r = orbit_bounded(&double, &double, &p(&[1.0]), 100, 10.0).unwrap();
        assert_eq!(
            r.verdict,
            OrbitVerdict::Exceeded {
                orbit: Orbit::S,
                step: 4,
                norm: 16.0
            }
        );

        let ball = Domain::Ball {
            center: p(&[0.0, 0.0]),
            radius: 1.0,
        };
        let s = map(Family::Rotation2d { angle: 1.0 }, ball.clone());
        let t = map(Family::Rotation2d { angle: 0.5 }, ball);
        let r = orbit_bounded(&s, &t, &p(&[1.0, 0.0]), 1000, 2.0).unwrap();
        assert!(r.bounded());
        assert!((r.max_norm_s - 1.0).abs() < 1e-12);

        let double_on_interval = map(Family::Scale { factor: 2.0 }, d).into_space();
        assert!(matches!(
            orbit_bounded(&double_on_interval, &double_on_interval, &p(&[1.0]), 10, 100.0),
            Err(Error::LeftDomain { step: 1, .. })
        ));
        assert!(orbit_bounded(&half, &half, &p(&[1.0]), 0, 10.0).is_err());
        assert_eq!(default_orbit_bound(&p(&[3.0, 4.0])), 6e6);
    }
}
