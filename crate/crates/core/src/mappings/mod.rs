//! Concrete mapping families, evaluation on a domain, and verifiers for
//! the hybrid-class inequalities.

mod domain;
mod hybrid;

pub use domain::{linspace, Domain};
pub use hybrid::{
    check_berinde, check_further_hybrid, check_nonexpansive, check_normally_hybrid,
    check_quasi_nonexpansive, check_theorem_conditions, check_widely_more_hybrid,
    hybrid_lhs_values, ClassCheckReport, HybridClass, HybridParams, PairSet, TheoremConditions,
    Verdict,
};

use serde::{Deserialize, Serialize};

use crate::convex::ConvexSet;
use crate::error::{Error, Result};
use crate::geometry::{same_dim, Point};

/// A mapping family with its parameters.
///
/// Serialized adjacently tagged: `{"family": "scale", "params": {"factor": 0.5}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    Identity,
    /// `x ↦ A x + b`, with `matrix` given row by row.
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Point,
    },
    /// `x ↦ c x`.
    Scale { factor: f64 },
    Translation { offset: Point },
    /// Counter-clockwise rotation of the plane about the origin.
    Rotation2d { angle: f64 },
    Constant { point: Point },
    /// A one-dimensional quasi-contractive map in the sense of Berinde,
    /// `‖Tx−Ty‖ ≤ a‖x−y‖ + L‖x−Tx‖` on `[0, 1]`:
    ///
    /// ```text
    /// T x = a x        for x ≤ 1/2
    /// T x = a x − s    for x > 1/2,   s = a L (1−a) / (2 (a + L (1−a)))
    /// ```
    ///
    /// The downward jump satisfies `s ≤ min(a, L(1−a))/2`, which is what
    /// the certificate `(a, L)` needs on pairs straddling `1/2`. The map
    /// sends `[0, 1]` into itself and fixes only `0`. It is discontinuous
    /// for `L > 0`, hence not nonexpansive.
    Berinde {
        contraction: f64,
        residual_weight: f64,
    },
    /// `x ↦ P_K(inner(x))`.
    Projected { inner: Box<Family>, set: ConvexSet },
}

impl Family {
    /// Checks parameters against the ambient dimension.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidMapping(msg));
        let need_dim = |p: &Point| {
            if p.dim() == dim {
                Ok(())
            } else {
                Err(Error::DomainMismatch(format!(
                    "mapping parameter of dim {} on a domain of dim {dim}",
                    p.dim()
                )))
            }
        };
        match self {
            Family::Identity => Ok(()),
            Family::Affine { matrix, offset } => {
                need_dim(offset)?;
                if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(Error::DomainMismatch(format!(
                        "affine matrix must be {dim}x{dim}"
                    )));
                }
                if matrix.iter().flatten().any(|v| !v.is_finite()) {
                    return invalid("affine matrix has non-finite entries".into());
                }
                Ok(())
            }
            Family::Scale { factor } => {
                if factor.is_finite() {
                    Ok(())
                } else {
                    invalid(format!("scale factor {factor} is not finite"))
                }
            }
            Family::Translation { offset } => need_dim(offset),
            Family::Rotation2d { angle } => {
                if dim != 2 {
                    return Err(Error::DomainMismatch(format!(
                        "rotation2d needs a 2-dimensional domain, got {dim}"
                    )));
                }
                if angle.is_finite() {
                    Ok(())
                } else {
                    invalid(format!("rotation angle {angle} is not finite"))
                }
            }
            Family::Constant { point } => need_dim(point),
            Family::Berinde {
                contraction,
                residual_weight,
            } => {
                if dim != 1 {
                    return Err(Error::DomainMismatch(format!(
                        "berinde map is one-dimensional, got {dim}"
                    )));
                }
                if !(*contraction > 0.0 && *contraction < 1.0) {
                    return invalid(format!("berinde contraction {contraction} outside (0,1)"));
                }
                if !(residual_weight.is_finite() && *residual_weight >= 0.0) {
                    return invalid(format!("berinde residual weight {residual_weight} < 0"));
                }
                Ok(())
            }
            Family::Projected { inner, set } => {
                if set.dim() != dim {
                    return Err(Error::DomainMismatch(format!(
                        "projection set of dim {} on a domain of dim {dim}",
                        set.dim()
                    )));
                }
                inner.validate(dim)
            }
        }
    }

    /// Evaluates the formula with no domain check.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            Family::Identity => Ok(x.clone()),
            Family::Affine { matrix, offset } => {
                same_dim(x, offset)?;
                let coords = matrix
                    .iter()
                    .zip(offset.coords())
                    .map(|(row, b)| row.iter().zip(x.coords()).map(|(a, v)| a * v).sum::<f64>() + b)
                    .collect();
                Ok(Point::from_raw(coords))
            }
            Family::Scale { factor } => Ok(x.scale(*factor)),
            Family::Translation { offset } => x.add(offset),
            Family::Rotation2d { angle } => {
                let [a, b] = x.coords() else {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: x.dim(),
                    });
                };
                let (s, c) = angle.sin_cos();
                Ok(Point::from_raw(vec![c * a - s * b, s * a + c * b]))
            }
            Family::Constant { point } => {
                same_dim(x, point)?;
                Ok(point.clone())
            }
            Family::Berinde {
                contraction,
                residual_weight,
            } => {
                let [v] = x.coords() else {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        found: x.dim(),
                    });
                };
                let a = *contraction;
                let image = if *v <= 0.5 {
                    a * v
                } else {
                    a * v - berinde_jump(a, *residual_weight)
                };
                Ok(Point::from_raw(vec![image]))
            }
            Family::Projected { inner, set } => set.project(&inner.apply(x)?),
        }
    }
}

/// Jump height of the [`Family::Berinde`] map.
pub fn berinde_jump(contraction: f64, residual_weight: f64) -> f64 {
    let (a, l) = (contraction, residual_weight);
    a * l * (1.0 - a) / (2.0 * (a + l * (1.0 - a)))
}

#[derive(Serialize, Deserialize)]
struct MappingRepr {
    #[serde(flatten)]
    family: Family,
    domain: Domain,
    #[serde(default = "default_self_map")]
    self_map: bool,
}

fn default_self_map() -> bool {
    true
}

/// A family bound to a domain; the unit every algorithm evaluates.
///
/// `self_map` declares `T: C → C`. Evaluation is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MappingRepr", into = "MappingRepr")]
pub struct Mapping {
    family: Family,
    domain: Domain,
    self_map: bool,
}

impl Mapping {
    pub fn new(family: Family, domain: Domain) -> Result<Self> {
        domain.validate()?;
        family.validate(domain.dim())?;
        Ok(Self {
            family,
            domain,
            self_map: true,
        })
    }

    /// Marks the mapping as `C → H` (images may leave the domain).
    pub fn into_space(mut self) -> Self {
        self.self_map = false;
        self
    }

    pub fn with_self_map(mut self, self_map: bool) -> Self {
        self.self_map = self_map;
        self
    }

    pub fn identity(domain: Domain) -> Result<Self> {
        Self::new(Family::Identity, domain)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_self_map(&self) -> bool {
        self.self_map
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.family, Family::Identity)
    }

    /// `T x` for `x` in the domain.
    pub fn eval(&self, x: &Point) -> Result<Point> {
        if !self.domain.contains_default(x)? {
            return Err(Error::OutsideDomain {
                domain: self.domain.to_string(),
                point: x.clone(),
            });
        }
        self.family.apply(x)
    }

    /// First sample point whose image leaves the domain, if any.
    pub fn self_map_violation(&self, sample: &[Point]) -> Result<Option<Point>> {
        for x in sample {
            if !self.domain.contains_default(&self.eval(x)?)? {
                return Ok(Some(x.clone()));
            }
        }
        Ok(None)
    }
}

impl TryFrom<MappingRepr> for Mapping {
    type Error = Error;

    fn try_from(r: MappingRepr) -> Result<Self> {
        Ok(Mapping::new(r.family, r.domain)?.with_self_map(r.self_map))
    }
}

impl From<Mapping> for MappingRepr {
    fn from(m: Mapping) -> Self {
        MappingRepr {
            family: m.family,
            domain: m.domain,
            self_map: m.self_map,
        }
    }
}
