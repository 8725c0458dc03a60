use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a point needs at least one coordinate")]
    EmptyPoint,

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("step outside (0,1): {value}")]
    StepOutOfRange { value: f64 },

    #[error("step sequence rejected: liminf alpha_n(1-alpha_n) bound is {bound} ({reason})")]
    DegenerateSteps { bound: f64, reason: String },

    #[error("point {point} is outside domain {domain}")]
    OutsideDomain { domain: String, point: Point },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("missing hybrid parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("claimed fixed point {point} has residual {residual} > {tol}")]
    NotAFixedPoint { point: Point, residual: f64, tol: f64 },

    #[error("invalid convex set: {0}")]
    InvalidSet(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("point {point} is not a member of {set}")]
    NotAMember { set: String, point: Point },

    /// Soft failure of an iterative projection; carries the best iterate.
    #[error("projection did not converge: residual {residual:e} after {sweeps} sweeps")]
    ProjectionNotConverged {
        best: Point,
        residual: f64,
        sweeps: usize,
    },

    #[error(
        "P_C z = {point} is not a common fixed point: residual S {residual_s:e}, residual T {residual_t:e} (tol {tol:e})"
    )]
    BridgeResidual {
        point: Point,
        residual_s: f64,
        residual_t: f64,
        tol: f64,
    },

    #[error("step {step}: {which} = {point} left the domain {domain}")]
    LeftDomain {
        step: usize,
        which: &'static str,
        point: Point,
        domain: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trace carries no projection series")]
    ProjectionsAbsent,
}
