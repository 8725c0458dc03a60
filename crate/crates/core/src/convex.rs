//! Canonical closed convex sets and their metric projections.
//!
//! Halfspaces, hyperplanes, boxes, balls and affine subspaces project in
//! closed form. Finite intersections use Dykstra's algorithm, which (unlike
//! plain alternating projections) converges to the nearest point of the
//! intersection rather than to an arbitrary member.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, inner, norm, norm_sq, same_dim, Point};

/// Serialized description of a convex set, tagged by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    /// `{x : ⟨normal, x⟩ ≤ offset}`
    Halfspace { normal: Point, offset: f64 },
    /// `{x : ⟨normal, x⟩ = offset}`
    Hyperplane { normal: Point, offset: f64 },
    Box { lower: Point, upper: Point },
    Ball { center: Point, radius: f64 },
    /// `anchor + span(basis)`; the basis need not be orthonormal.
    Affine { anchor: Point, basis: Vec<Point> },
    /// Nonemptiness of an intersection is the caller's responsibility.
    Intersection { sets: Vec<SetSpec> },
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Halfspace { normal: Point, offset: f64, normal_sq: f64 },
    Hyperplane { normal: Point, offset: f64, normal_sq: f64 },
    Box { lower: Point, upper: Point },
    Ball { center: Point, radius: f64 },
    Affine { anchor: Point, frame: Vec<Point> },
    Intersection(Vec<ConvexSet>),
}

/// A validated closed convex set in ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetSpec", into = "SetSpec")]
pub struct ConvexSet {
    spec: SetSpec,
    dim: usize,
    shape: Shape,
}

/// Stopping policy for Dykstra's algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DykstraOptions {
    /// Bound on the largest per-set change, of both the projected point and
    /// its correction increment, between two sweeps.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for DykstraOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_sweeps: 10_000,
        }
    }
}

/// A projected point with the achieved fixed-point residual.
///
/// Closed-form projections report `residual = 0` and `sweeps = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Point,
    pub residual: f64,
    pub sweeps: usize,
}

impl ConvexSet {
    pub fn new(spec: SetSpec) -> Result<Self> {
        let (dim, shape) = build(&spec)?;
        Ok(Self { spec, dim, shape })
    }

    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        Self::new(SetSpec::Halfspace { normal, offset })
    }

    pub fn hyperplane(normal: Point, offset: f64) -> Result<Self> {
        Self::new(SetSpec::Hyperplane { normal, offset })
    }

    pub fn bounding_box(lower: Point, upper: Point) -> Result<Self> {
        Self::new(SetSpec::Box { lower, upper })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(SetSpec::Ball { center, radius })
    }

    /// The singleton `{p}`, as a ball of radius zero.
    pub fn singleton(p: Point) -> Self {
        Self::ball(p, 0.0).expect("radius zero is valid")
    }

    pub fn affine(anchor: Point, basis: Vec<Point>) -> Result<Self> {
        Self::new(SetSpec::Affine { anchor, basis })
    }

    pub fn intersection(sets: Vec<ConvexSet>) -> Result<Self> {
        Self::new(SetSpec::Intersection {
            sets: sets.into_iter().map(|s| s.spec).collect(),
        })
    }

    pub fn spec(&self) -> &SetSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Membership up to `tol`, measured as distance to the set for the
    /// closed-form kinds; intersections require every member check.
    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        Ok(match &self.shape {
            Shape::Halfspace {
                normal,
                offset,
                normal_sq,
            } => (inner(normal, x)? - offset) / normal_sq.sqrt() <= tol,
            Shape::Hyperplane {
                normal,
                offset,
                normal_sq,
            } => (inner(normal, x)? - offset).abs() / normal_sq.sqrt() <= tol,
            Shape::Box { lower, upper } => x
                .coords()
                .iter()
                .zip(lower.coords().iter().zip(upper.coords()))
                .all(|(&v, (&lo, &hi))| v >= lo - tol && v <= hi + tol),
            Shape::Ball { center, radius } => dist(x, center)? <= radius + tol,
            Shape::Affine { .. } => dist(x, &self.project(x)?)? <= tol,
            Shape::Intersection(sets) => {
                for s in sets {
                    if !s.contains(x, tol)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Metric projection with default Dykstra options.
    ///
    /// A non-converging intersection yields
    /// [`Error::ProjectionNotConverged`] carrying the best iterate.
    pub fn project(&self, x: &Point) -> Result<Point> {
        self.project_with(x, DykstraOptions::default())
            .map(|p| p.point)
    }

    pub fn project_with(&self, x: &Point, opts: DykstraOptions) -> Result<Projection> {
        self.check_dim(x)?;
        let exact = |point| {
            Ok(Projection {
                point,
                residual: 0.0,
                sweeps: 0,
            })
        };
        match &self.shape {
            Shape::Halfspace {
                normal,
                offset,
                normal_sq,
            } => {
                let excess = inner(normal, x)? - offset;
                if excess <= 0.0 {
                    exact(x.clone())
                } else {
                    exact(x.add_scaled(-excess / normal_sq, normal)?)
                }
            }
            Shape::Hyperplane {
                normal,
                offset,
                normal_sq,
            } => {
                let excess = inner(normal, x)? - offset;
                exact(x.add_scaled(-excess / normal_sq, normal)?)
            }
            Shape::Box { lower, upper } => {
                let coords = x
                    .coords()
                    .iter()
                    .zip(lower.coords().iter().zip(upper.coords()))
                    .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
                    .collect();
                exact(Point::from_raw(coords))
            }
            Shape::Ball { center, radius } => {
                let offset = x.sub(center)?;
                let r = norm(&offset);
                if r <= *radius {
                    exact(x.clone())
                } else {
                    exact(center.add_scaled(radius / r, &offset)?)
                }
            }
            Shape::Affine { anchor, frame } => {
                let rel = x.sub(anchor)?;
                let mut out = anchor.clone();
                for e in frame {
                    out = out.add_scaled(inner(&rel, e)?, e)?;
                }
                exact(out)
            }
            Shape::Intersection(sets) => dykstra(sets, x, opts),
        }
    }

    /// `⟨x − P x, P x − z⟩` for a member `z`; nonnegative up to rounding.
    pub fn variational_gap(&self, x: &Point, z: &Point, tol: f64) -> Result<f64> {
        if !self.contains(z, tol)? {
            return Err(Error::NotAMember {
                set: self.to_string(),
                point: z.clone(),
            });
        }
        let px = self.project(x)?;
        inner(&x.sub(&px)?, &px.sub(z)?)
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            })
        }
    }
}

impl TryFrom<SetSpec> for ConvexSet {
    type Error = Error;

    fn try_from(spec: SetSpec) -> Result<Self> {
        ConvexSet::new(spec)
    }
}

impl From<ConvexSet> for SetSpec {
    fn from(s: ConvexSet) -> Self {
        s.spec
    }
}

impl fmt::Display for ConvexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            SetSpec::Halfspace { normal, offset } => write!(f, "halfspace <{normal}, x> <= {offset}"),
            SetSpec::Hyperplane { normal, offset } => write!(f, "hyperplane <{normal}, x> = {offset}"),
            SetSpec::Box { lower, upper } => write!(f, "box {lower}..{upper}"),
            SetSpec::Ball { center, radius } => write!(f, "ball({center}, {radius})"),
            SetSpec::Affine { anchor, basis } => {
                write!(f, "affine subspace through {anchor} of dim {}", basis.len())
            }
            SetSpec::Intersection { sets } => write!(f, "intersection of {} sets", sets.len()),
        }
    }
}

fn build(spec: &SetSpec) -> Result<(usize, Shape)> {
    let invalid = |msg: String| Err(Error::InvalidSet(msg));
    match spec {
        SetSpec::Halfspace { normal, offset } | SetSpec::Hyperplane { normal, offset } => {
            let normal_sq = norm_sq(normal);
            if normal_sq == 0.0 {
                return invalid("normal vector must be nonzero".into());
            }
            if !offset.is_finite() {
                return invalid(format!("offset {offset} is not finite"));
            }
            let dim = normal.dim();
            let (normal, offset) = (normal.clone(), *offset);
            let shape = if matches!(spec, SetSpec::Halfspace { .. }) {
                Shape::Halfspace { normal, offset, normal_sq }
            } else {
                Shape::Hyperplane { normal, offset, normal_sq }
            };
            Ok((dim, shape))
        }
        SetSpec::Box { lower, upper } => {
            same_dim(lower, upper)?;
            if let Some(i) = (0..lower.dim()).find(|&i| lower.coords()[i] > upper.coords()[i]) {
                return invalid(format!("box lower > upper in coordinate {i}"));
            }
            Ok((
                lower.dim(),
                Shape::Box {
                    lower: lower.clone(),
                    upper: upper.clone(),
                },
            ))
        }
        SetSpec::Ball { center, radius } => {
            if !(radius.is_finite() && *radius >= 0.0) {
                return invalid(format!("ball radius {radius} must be finite and >= 0"));
            }
            Ok((
                center.dim(),
                Shape::Ball {
                    center: center.clone(),
                    radius: *radius,
                },
            ))
        }
        SetSpec::Affine { anchor, basis } => {
            if basis.len() > anchor.dim() {
                return invalid(format!(
                    "{} basis vectors in dimension {}",
                    basis.len(),
                    anchor.dim()
                ));
            }
            for b in basis {
                same_dim(anchor, b)?;
            }
            Ok((
                anchor.dim(),
                Shape::Affine {
                    anchor: anchor.clone(),
                    frame: orthonormalize(basis)?,
                },
            ))
        }
        SetSpec::Intersection { sets } => {
            if sets.is_empty() {
                return invalid("intersection needs at least one set".into());
            }
            let members = sets
                .iter()
                .cloned()
                .map(ConvexSet::new)
                .collect::<Result<Vec<_>>>()?;
            let dim = members[0].dim;
            if let Some(bad) = members.iter().find(|m| m.dim != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad.dim,
                });
            }
            Ok((dim, Shape::Intersection(members)))
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
fn orthonormalize(basis: &[Point]) -> Result<Vec<Point>> {
    let mut frame: Vec<Point> = Vec::with_capacity(basis.len());
    for (i, b) in basis.iter().enumerate() {
        let original = norm(b);
        let mut v = b.clone();
        for _ in 0..2 {
            for e in &frame {
                v = v.add_scaled(-inner(&v, e)?, e)?;
            }
        }
        let n = norm(&v);
        if original == 0.0 || n <= 1e-12 * original {
            return Err(Error::InvalidSet(format!(
                "affine basis is rank deficient at vector {i}"
            )));
        }
        frame.push(v.scale(1.0 / n));
    }
    Ok(frame)
}

fn dykstra(sets: &[ConvexSet], x0: &Point, opts: DykstraOptions) -> Result<Projection> {
    if let [only] = sets {
        return only.project_with(x0, opts);
    }
    let mut x = x0.clone();
    let mut increments = vec![Point::zeros(x0.dim()); sets.len()];
    let mut slots = vec![x0.clone(); sets.len()];
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_sweeps {
        residual = 0.0;
        for (i, set) in sets.iter().enumerate() {
            let shifted = x.add(&increments[i])?;
            let next = match set.project_with(&shifted, opts) {
                Ok(p) => p.point,
                Err(Error::ProjectionNotConverged { best, .. }) => best,
                Err(e) => return Err(e),
            };
            let increment = shifted.sub(&next)?;
            residual = residual
                .max(dist(&next, &slots[i])?)
                .max(dist(&increment, &increments[i])?);
            increments[i] = increment;
            slots[i] = next.clone();
            x = next;
        }
        if residual <= opts.tol {
            return Ok(Projection {
                point: x,
                residual,
                sweeps: sweep,
            });
        }
    }
    Err(Error::ProjectionNotConverged {
        best: x,
        residual,
        sweeps: opts.max_sweeps,
    })
}
