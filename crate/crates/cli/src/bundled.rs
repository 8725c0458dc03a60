//! The acceptance scenarios shipped with the binary.

use crate::scenario::{Scenario, ScenarioError};

pub const BUNDLED: &[(&str, &str)] = &[
    (
        "contraction-halving",
        include_str!("../scenarios/contraction-halving.json"),
    ),
    ("two-map", include_str!("../scenarios/two-map.json")),
    (
        "rotation-isometry",
        include_str!("../scenarios/rotation-isometry.json"),
    ),
    (
        "expansive-control",
        include_str!("../scenarios/expansive-control.json"),
    ),
    ("berinde", include_str!("../scenarios/berinde.json")),
    ("affine-box", include_str!("../scenarios/affine-box.json")),
];

/// Every bundled scenario, in suite order.
pub fn bundled_scenarios() -> Result<Vec<Scenario>, ScenarioError> {
    BUNDLED
        .iter()
        .map(|(name, text)| Scenario::from_json(text, &format!("bundled:{name}")))
        .collect()
}

pub fn bundled(name: &str) -> Option<Result<Scenario, ScenarioError>> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, text)| Scenario::from_json(text, &format!("bundled:{n}")))
}
