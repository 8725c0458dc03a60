use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::ConvexSet;
use crate::error::{Error, Result};
use crate::geometry::{dist, norm, Point, Tolerance};

/// The set `C` a mapping acts on, with a deterministic sampler.
///
/// Convexity is not assumed: the `samples` kind is an arbitrary finite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Box {
        lower: Point,
        upper: Point,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    /// A possibly unbounded interval of ℝ. A missing end is unbounded;
    /// sampling then requires `sample_range`.
    Interval {
        #[serde(default)]
        lo: Option<f64>,
        #[serde(default)]
        hi: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_range: Option<[f64; 2]>,
    },
    Samples {
        points: Vec<Point>,
    },
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Domain::Interval {
            lo: Some(lo),
            hi: Some(hi),
            sample_range: None,
        }
    }

    /// The whole real line, sampled on `[lo, hi]`.
    pub fn real_line(lo: f64, hi: f64) -> Self {
        Domain::Interval {
            lo: None,
            hi: None,
            sample_range: Some([lo, hi]),
        }
    }

    pub fn unit_box(dim: usize) -> Self {
        Domain::Box {
            lower: Point::zeros(dim),
            upper: Point::zeros(dim).map(|_| 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidDomain(msg));
        match self {
            Domain::Box { lower, upper } => {
                if lower.dim() != upper.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: lower.dim(),
                        found: upper.dim(),
                    });
                }
                if lower.coords().iter().zip(upper.coords()).any(|(l, u)| l > u) {
                    return invalid("box lower corner exceeds upper corner".into());
                }
            }
            Domain::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius >= 0.0) {
                    return invalid(format!("ball radius {radius} must be finite and >= 0"));
                }
            }
            Domain::Interval {
                lo,
                hi,
                sample_range,
            } => {
                for v in lo.iter().chain(hi).chain(sample_range.iter().flatten()) {
                    if !v.is_finite() {
                        return invalid(format!("interval bound {v} is not finite"));
                    }
                }
                if let (Some(l), Some(h)) = (lo, hi) {
                    if l > h {
                        return invalid(format!("interval [{l}, {h}] is empty"));
                    }
                }
                if let Some([a, b]) = sample_range {
                    if a > b {
                        return invalid(format!("sample range [{a}, {b}] is empty"));
                    }
                    if lo.is_some_and(|l| *b < l) || hi.is_some_and(|h| *a > h) {
                        return invalid("sample range misses the interval".into());
                    }
                }
            }
            Domain::Samples { points } => {
                let first = points.first().ok_or(Error::Empty {
                    what: "sample domain",
                })?;
                if let Some(p) = points.iter().find(|p| p.dim() != first.dim()) {
                    return Err(Error::DimensionMismatch {
                        expected: first.dim(),
                        found: p.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lower, .. } => lower.dim(),
            Domain::Ball { center, .. } => center.dim(),
            Domain::Interval { .. } => 1,
            Domain::Samples { points } => points.first().map_or(0, Point::dim),
        }
    }

    /// Whether the domain is closed and convex (every kind except samples).
    pub fn is_convex(&self) -> bool {
        !matches!(self, Domain::Samples { .. })
    }

    /// Membership up to `tol`.
    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(match self {
            Domain::Box { lower, upper } => x
                .coords()
                .iter()
                .zip(lower.coords().iter().zip(upper.coords()))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            Domain::Ball { center, radius } => dist(x, center)? <= radius + tol,
            Domain::Interval { lo, hi, .. } => {
                let v = x.coords()[0];
                lo.is_none_or(|l| v >= l - tol) && hi.is_none_or(|h| v <= h + tol)
            }
            Domain::Samples { points } => {
                for p in points {
                    if dist(p, x)? <= tol {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Membership with the crate-wide default tolerance, scaled by `‖x‖`.
    pub fn contains_default(&self, x: &Point) -> Result<bool> {
        self.contains(x, Tolerance::DEFAULT.bound(norm(x)))
    }

    /// Cartesian grid with `per_axis` points per coordinate, filtered to
    /// the domain. The sample-list kind returns its points unchanged.
    pub fn grid(&self, per_axis: usize) -> Result<Vec<Point>> {
        if per_axis == 0 {
            return Err(Error::Empty { what: "grid" });
        }
        let (lower, upper) = match self {
            Domain::Samples { points } => return Ok(points.clone()),
            _ => self.sampling_box()?,
        };
        let axes: Vec<Vec<f64>> = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| if l < u { linspace(l, u, per_axis) } else { vec![l] })
            .collect();
        let mut out = Vec::new();
        let mut index = vec![0usize; axes.len()];
        loop {
            let coords = index.iter().zip(&axes).map(|(&i, ax)| ax[i]).collect();
            let p = Point::from_raw(coords);
            if self.contains(&p, 1e-12)? {
                out.push(p);
            }
            // odometer increment, last axis fastest
            let mut k = axes.len();
            loop {
                if k == 0 {
                    if out.is_empty() {
                        if let Domain::Ball { center, .. } = self {
                            out.push(center.clone());
                        }
                    }
                    return Ok(out);
                }
                k -= 1;
                index[k] += 1;
                if index[k] < axes[k].len() {
                    break;
                }
                index[k] = 0;
            }
        }
    }

    /// `count` seeded uniform points; the same seed reproduces the list.
    pub fn random(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Domain::Samples { points } = self {
            return Ok((0..count)
                .map(|_| points[rng.gen_range(0..points.len())].clone())
                .collect());
        }
        let (lower, upper) = self.sampling_box()?;
        let draw = |rng: &mut ChaCha8Rng| {
            Point::from_raw(
                lower
                    .iter()
                    .zip(&upper)
                    .map(|(&l, &u)| if l < u { rng.gen_range(l..=u) } else { l })
                    .collect(),
            )
        };
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p = draw(&mut rng);
            if self.contains(&p, 0.0)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// The domain as a closed convex set, when it is one.
    ///
    /// Returns `None` for sample lists and for the whole real line.
    pub fn as_convex_set(&self) -> Option<ConvexSet> {
        match self {
            Domain::Box { lower, upper } => {
                ConvexSet::bounding_box(lower.clone(), upper.clone()).ok()
            }
            Domain::Ball { center, radius } => ConvexSet::ball(center.clone(), *radius).ok(),
            Domain::Interval { lo, hi, .. } => match (lo, hi) {
                (Some(l), Some(h)) => {
                    ConvexSet::bounding_box(Point::scalar(*l).ok()?, Point::scalar(*h).ok()?).ok()
                }
                (Some(l), None) => ConvexSet::halfspace(Point::scalar(-1.0).ok()?, -l).ok(),
                (None, Some(h)) => ConvexSet::halfspace(Point::scalar(1.0).ok()?, *h).ok(),
                (None, None) => None,
            },
            Domain::Samples { .. } => None,
        }
    }

    fn sampling_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Domain::Box { lower, upper } => Ok((lower.coords().to_vec(), upper.coords().to_vec())),
            Domain::Ball { center, radius } => Ok((
                center.coords().iter().map(|c| c - radius).collect(),
                center.coords().iter().map(|c| c + radius).collect(),
            )),
            Domain::Interval {
                lo,
                hi,
                sample_range,
            } => {
                let (a, b) = match (sample_range, lo, hi) {
                    (Some([a, b]), _, _) => (
                        lo.map_or(*a, |l| a.max(l)),
                        hi.map_or(*b, |h| b.min(h)),
                    ),
                    (None, Some(l), Some(h)) => (*l, *h),
                    _ => {
                        return Err(Error::InvalidDomain(
                            "unbounded interval needs a sample_range".into(),
                        ))
                    }
                };
                Ok((vec![a], vec![b]))
            }
            Domain::Samples { .. } => unreachable!("sample lists are not boxed"),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Box { lower, upper } => write!(f, "box {lower}..{upper}"),
            Domain::Ball { center, radius } => write!(f, "ball({center}, {radius})"),
            Domain::Interval { lo, hi, .. } => {
                let l = lo.map_or("(-inf".to_string(), |l| format!("[{l}"));
                let h = hi.map_or("+inf)".to_string(), |h| format!("{h}]"));
                write!(f, "{l}, {h}")
            }
            Domain::Samples { points } => write!(f, "{} sample points", points.len()),
        }
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_grid_hits_zero_exactly() {
        let g = linspace(-1.0, 1.0, 201);
        assert_eq!(g[100], 0.0);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[200], 1.0);
    }

    #[test]
    fn grids_stay_inside() {
        let ball = Domain::Ball {
            center: p(&[0.0, 0.0]),
            radius: 1.0,
        };
        let g = ball.grid(21).unwrap();
        assert!(g.len() > 300 && g.len() < 441);
        assert!(g.iter().all(|x| ball.contains(x, 0.0).unwrap()));
        assert!(g.contains(&p(&[0.0, 0.0])));

        let b = Domain::unit_box(2);
        assert_eq!(b.grid(5).unwrap().len(), 25);
        let i = Domain::interval(0.0, 1.0);
        assert_eq!(i.grid(41).unwrap().len(), 41);
    }

    #[test]
    fn degenerate_ball_grid_is_its_center() {
        let d = Domain::Ball {
            center: p(&[0.25]),
            radius: 0.0,
        };
        assert_eq!(d.grid(7).unwrap(), vec![p(&[0.25])]);
    }

    #[test]
    fn random_sampler_is_reproducible() {
        let d = Domain::Ball {
            center: p(&[1.0, -1.0, 0.0]),
            radius: 2.0,
        };
        let a = d.random(50, 9).unwrap();
        assert_eq!(a, d.random(50, 9).unwrap());
        assert_ne!(a, d.random(50, 10).unwrap());
        assert!(a.iter().all(|x| d.contains(x, 0.0).unwrap()));
    }

    #[test]
    fn unbounded_interval() {
        let line = Domain::real_line(-1.0, 1.0);
        line.validate().unwrap();
        assert!(line.contains(&p(&[1e12]), 0.0).unwrap());
        assert_eq!(line.grid(3).unwrap(), vec![p(&[-1.0]), p(&[0.0]), p(&[1.0])]);
        assert!(line.as_convex_set().is_none());

        let bare = Domain::Interval {
            lo: Some(0.0),
            hi: None,
            sample_range: None,
        };
        assert!(bare.grid(3).is_err());
        let half = bare.as_convex_set().unwrap();
        assert!(half.contains(&p(&[5.0]), 0.0).unwrap());
        assert!(!half.contains(&p(&[-0.5]), 1e-9).unwrap());
    }

    #[test]
    fn sample_list_membership() {
        let d = Domain::Samples {
            points: vec![p(&[0.0, 0.0]), p(&[1.0, 1.0])],
        };
        assert!(!d.is_convex());
        assert!(d.contains(&p(&[1.0, 1.0 + 1e-12]), 1e-9).unwrap());
        assert!(!d.contains(&p(&[0.5, 0.5]), 1e-9).unwrap());
        assert!(Domain::Samples { points: vec![] }.validate().is_err());
    }

    #[test]
    fn invalid_domains() {
        assert!(Domain::interval(1.0, 0.0).validate().is_err());
        assert!(Domain::Box {
            lower: p(&[0.0, 1.0]),
            upper: p(&[1.0, 0.0])
        }
        .validate()
        .is_err());
        assert!(Domain::Ball {
            center: p(&[0.0]),
            radius: -1.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn json_shape() {
        let d: Domain = serde_json::from_str(r#"{"kind":"interval","lo":0,"hi":1}"#).unwrap();
        assert_eq!(d, Domain::interval(0.0, 1.0));
        let line: Domain =
            serde_json::from_str(r#"{"kind":"interval","sample_range":[-1,1]}"#).unwrap();
        assert_eq!(line, Domain::real_line(-1.0, 1.0));
    }
}
