//! Scenario runner for the attractive-point toolkit: loading, the run
//! pipeline, and file output. The `attractor` binary is a thin shell
//! around this library.

pub mod bundled;
pub mod emit;
pub mod run;
pub mod scenario;

pub use emit::{emit, Format};
pub use run::{run_scenario, RunBundle, RunError};
pub use scenario::{load_scenario, Scenario, ScenarioError};
