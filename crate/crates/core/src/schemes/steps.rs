use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a step-size sequence `α_n`, `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSpec {
    Constant { alpha: f64 },
    /// `a` on odd `n`, `b` on even `n`.
    Periodic { a: f64, b: f64 },
    /// `α_n = a + (b−a)/n`, clipped into `[floor, 1−floor]`.
    /// `floor = 0` disables clipping.
    HarmonicFloor { a: f64, b: f64, floor: f64 },
}

/// A validated step sequence with a certified lower bound `L > 0` on
/// `α_n(1−α_n)` for every `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepSpec", into = "StepSpec")]
pub struct StepSequence {
    spec: StepSpec,
    lower_bound: f64,
}

fn product(alpha: f64) -> f64 {
    alpha * (1.0 - alpha)
}

fn open_unit(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::StepOutOfRange { value: alpha })
    }
}

/// Validates `spec` and derives its bound on `α_n(1−α_n)`.
pub fn make_step_sequence(spec: StepSpec) -> Result<StepSequence> {
    let lower_bound = match spec {
        StepSpec::Constant { alpha } => product(open_unit(alpha)?),
        StepSpec::Periodic { a, b } => product(open_unit(a)?).min(product(open_unit(b)?)),
        StepSpec::HarmonicFloor { a, b, floor } => {
            if !(0.0..0.5).contains(&floor) {
                return Err(Error::InvalidArgument(format!(
                    "harmonic floor must lie in [0, 0.5), got {floor}"
                )));
            }
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidArgument("step parameters must be finite".into()));
            }
            let clip = |v: f64| v.clamp(floor, 1.0 - floor);
            // α_n moves monotonically from α_1 = clip(b) towards clip(a)
            let (first, limit) = (clip(b), clip(a));
            open_unit(first)?;
            let bound = product(first).min(product(limit));
            if !(bound > 0.0) {
                return Err(Error::DegenerateSteps {
                    bound,
                    reason: format!("α_n tends to {limit}"),
                });
            }
            bound
        }
    };
    Ok(StepSequence { spec, lower_bound })
}

impl StepSequence {
    pub fn constant(alpha: f64) -> Result<Self> {
        make_step_sequence(StepSpec::Constant { alpha })
    }

    pub fn spec(&self) -> &StepSpec {
        &self.spec
    }

    /// `L` with `α_n(1−α_n) ≥ L` for all `n ≥ 1`.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// `α_n` for `n ≥ 1`.
    pub fn alpha(&self, n: usize) -> f64 {
        let n = n.max(1);
        match self.spec {
            StepSpec::Constant { alpha } => alpha,
            StepSpec::Periodic { a, b } => {
                if n % 2 == 1 {
                    a
                } else {
                    b
                }
            }
            StepSpec::HarmonicFloor { a, b, floor } => {
                (a + (b - a) / n as f64).clamp(floor, 1.0 - floor)
            }
        }
    }
}

impl TryFrom<StepSpec> for StepSequence {
    type Error = Error;

    fn try_from(spec: StepSpec) -> Result<Self> {
        make_step_sequence(spec)
    }
}

impl From<StepSequence> for StepSpec {
    fn from(s: StepSequence) -> Self {
        s.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_bounds() {
        assert_eq!(StepSequence::constant(0.5).unwrap().lower_bound(), 0.25);
        assert!((StepSequence::constant(0.9).unwrap().lower_bound() - 0.09).abs() < 1e-15);
        for bad in [0.0, 1.0, 1.2, -0.5] {
            let err = StepSequence::constant(bad).unwrap_err();
            assert!(err.to_string().contains("step outside (0,1)"), "{err}");
        }
    }

    #[test]
    fn periodic_takes_the_worse_phase() {
        let s = make_step_sequence(StepSpec::Periodic { a: 0.5, b: 0.8 }).unwrap();
        assert!((s.lower_bound() - 0.16).abs() < 1e-15);
        assert_eq!((s.alpha(1), s.alpha(2), s.alpha(3)), (0.5, 0.8, 0.5));
    }

    #[test]
    fn harmonic_floor() {
        let s = make_step_sequence(StepSpec::HarmonicFloor {
            a: 0.0,
            b: 0.9,
            floor: 0.1,
        })
        .unwrap();
        assert!((s.lower_bound() - 0.09).abs() < 1e-15);
        for n in 1..500 {
            let a = s.alpha(n);
            assert!(a * (1.0 - a) >= s.lower_bound() - 1e-15);
        }
        assert_eq!(s.alpha(10_000), 0.1);

        let drifting = make_step_sequence(StepSpec::HarmonicFloor {
            a: 0.0,
            b: 0.9,
            floor: 0.0,
        });
        assert!(matches!(drifting, Err(Error::DegenerateSteps { bound, .. }) if bound == 0.0));
    }

    #[test]
    fn serde_revalidates() {
        let s: StepSequence = serde_json::from_str(r#"{"kind":"constant","alpha":0.5}"#).unwrap();
        assert_eq!(s.alpha(7), 0.5);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"kind":"constant","alpha":0.5}"#
        );
        let bad = serde_json::from_str::<StepSequence>(r#"{"kind":"constant","alpha":1.0}"#);
        assert!(bad.unwrap_err().to_string().contains("step outside (0,1)"));
    }
}
