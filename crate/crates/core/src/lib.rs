//! Common attractive points of hybrid-type mappings in ℝⁿ.
//!
//! Verifiers for the hybrid inequalities, metric projections, attractive
//! point machinery, and Mann-type iteration schemes with diagnostics.
//! Class membership and attractivity are always decided on finite samples.

pub mod attractive;
pub mod convex;
pub mod error;
pub mod geometry;
pub mod mappings;
pub mod schemes;

pub use attractive::{CapEstimate, Membership, OrbitReport};
pub use convex::{ConvexSet, SetSpec};
pub use error::{Error, Result};
pub use geometry::{Point, Tolerance};
pub use mappings::{Domain, Family, HybridParams, Mapping};
pub use schemes::{ConvergenceTrace, Probes, SchemeKind, StepSequence, StopRule};
