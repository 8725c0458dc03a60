//! Finite-dimensional Hilbert-space primitives over `f64`.
//!
//! Everything here works in ℝⁿ with the standard dot product. Points are
//! immutable values: every operation returns a fresh [`Point`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute-plus-relative tolerance, `atol + rtol * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        atol: 1e-9,
        rtol: 1e-9,
    };

    pub const fn new(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol }
    }

    /// Admissible error for a quantity of magnitude `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A vector in ℝⁿ with `n >= 1` and finite coordinates.
///
/// Serializes as a plain JSON array, e.g. `[0.5, -1.25]`. Non-finite values
/// are rejected at construction and on deserialization.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(coords))
    }

    /// One-dimensional point.
    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim.max(1)])
    }

    /// Arithmetic results of finite inputs; overflow is caught by the
    /// iteration divergence guard, not here.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, other: &Point) -> Result<Point> {
        same_dim(self, other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        same_dim(self, other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|v| v * factor).collect())
    }

    /// `self + factor * direction`.
    pub fn add_scaled(&self, factor: f64, direction: &Point) -> Result<Point> {
        same_dim(self, direction)?;
        Ok(self.zip_with(direction, |a, d| a + factor * d))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Point {
        Point(self.0.iter().map(|&v| f(v)).collect())
    }

    fn zip_with(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn same_dim(u: &Point, v: &Point) -> Result<()> {
    if u.dim() == v.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        })
    }
}

/// `Σ uᵢvᵢ`.
pub fn inner(u: &Point, v: &Point) -> Result<f64> {
    same_dim(u, v)?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum())
}

pub fn norm_sq(u: &Point) -> f64 {
    u.0.iter().map(|a| a * a).sum()
}

/// Euclidean norm; falls back to a scaled sum when the squares overflow.
pub fn norm(u: &Point) -> f64 {
    scaled_root(norm_sq(u), u.0.iter().copied())
}

fn scaled_root(sum_sq: f64, terms: impl Iterator<Item = f64>) -> f64 {
    if sum_sq.is_finite() {
        sum_sq.sqrt()
    } else {
        terms.fold(0.0, f64::hypot)
    }
}

pub fn dist_sq(u: &Point, v: &Point) -> Result<f64> {
    same_dim(u, v)?;
    Ok(u.0
        .iter()
        .zip(&v.0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

pub fn dist(u: &Point, v: &Point) -> Result<f64> {
    let sq = dist_sq(u, v)?;
    Ok(scaled_root(sq, u.0.iter().zip(&v.0).map(|(a, b)| a - b)))
}

/// `2⟨u−v, p−w⟩ − (‖u−w‖² + ‖v−p‖² − ‖u−p‖² − ‖v−w‖²)`.
///
/// Identically zero in any real inner-product space; both sides are
/// evaluated independently so that the identity can be asserted.
pub fn polarization_gap(u: &Point, v: &Point, p: &Point, w: &Point) -> Result<f64> {
    same_dim(u, v)?;
    same_dim(u, p)?;
    same_dim(u, w)?;
    let lhs = 2.0 * inner(&u.sub(v)?, &p.sub(w)?)?;
    let rhs = dist_sq(u, w)? + dist_sq(v, p)? - dist_sq(u, p)? - dist_sq(v, w)?;
    Ok(lhs - rhs)
}

/// `(1−α)x + αTx`, the Mann averaging step.
///
/// Evaluated as `x + α(Tx − x)`, which is exact when `x == tx`.
pub fn mann_combination(x: &Point, tx: &Point, alpha: f64) -> Result<Point> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::StepOutOfRange { value: alpha });
    }
    same_dim(x, tx)?;
    Ok(x.zip_with(tx, |a, b| a + alpha * (b - a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&p(&[1.0, 0.0]), &p(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(inner(&p(&[1.0, 2.0]), &p(&[3.0, 4.0])).unwrap(), 11.0);
        let u = p(&[3.0, 4.0]);
        assert_eq!(inner(&u, &u).unwrap(), 25.0);
    }

    #[test]
    fn norm_survives_overflowing_squares() {
        let big = p(&[3e200, 4e200]);
        assert!(norm_sq(&big).is_infinite());
        assert!((norm(&big) / 5e200 - 1.0).abs() < 1e-15);
        let d = dist(&big, &p(&[0.0, 0.0])).unwrap();
        assert!((d / 5e200 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = inner(&p(&[1.0]), &p(&[1.0, 2.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
        assert!(dist(&p(&[1.0]), &p(&[1.0, 2.0])).is_err());
        assert!(polarization_gap(&p(&[1.0]), &p(&[1.0]), &p(&[1.0]), &p(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn construction_rejects_bad_coordinates() {
        assert_eq!(Point::new(vec![]), Err(Error::EmptyPoint));
        assert!(matches!(
            Point::new(vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }

    #[test]
    fn norms_and_distances() {
        assert_eq!(norm_sq(&p(&[0.0, 0.0])), 0.0);
        assert_eq!(dist(&p(&[1.0, 1.0]), &p(&[4.0, 5.0])).unwrap(), 5.0);
        let (u, v) = (p(&[0.3]), p(&[-0.7]));
        assert_eq!(dist(&u, &v).unwrap(), dist(&v, &u).unwrap());
        assert!((dist(&u, &v).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polarization_examples() {
        let a = p(&[1.0, 2.0]);
        assert_eq!(polarization_gap(&a, &a, &a, &a).unwrap(), 0.0);
        let gap = polarization_gap(
            &p(&[1.0, 0.0]),
            &p(&[0.0, 0.0]),
            &p(&[0.0, 1.0]),
            &p(&[0.0, 0.0]),
        )
        .unwrap();
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn mann_examples() {
        assert_eq!(
            mann_combination(&p(&[0.0]), &p(&[1.0]), 0.5).unwrap(),
            p(&[0.5])
        );
        let x = p(&[2.0, 3.0]);
        for alpha in [0.01, 0.1, 0.37, 0.5, 0.99] {
            assert_eq!(mann_combination(&x, &x, alpha).unwrap(), x);
        }
        assert_eq!(
            mann_combination(&p(&[0.0, 0.0]), &p(&[4.0, 0.0]), 0.25).unwrap(),
            p(&[1.0, 0.0])
        );
    }

    #[test]
    fn mann_rejects_closed_endpoints() {
        for alpha in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                mann_combination(&p(&[0.0]), &p(&[1.0]), alpha),
                Err(Error::StepOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn json_is_a_bare_array() {
        let x = p(&[0.5, -1.25]);
        assert_eq!(serde_json::to_string(&x).unwrap(), "[0.5,-1.25]");
        let back: Point = serde_json::from_str("[0.5, -1.25]").unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn tolerance_bound() {
        let t = Tolerance::new(1e-9, 1e-6);
        assert_eq!(t.bound(0.0), 1e-9);
        assert!((t.bound(-2.0) - (1e-9 + 2e-6)).abs() < 1e-20);
    }
}
