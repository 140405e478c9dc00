#![allow(dead_code)]

use std::path::PathBuf;

use apfsa::scenario::{load_scenario, Scenario};

pub const BUNDLED: [&str; 4] = ["trap", "goal_guard", "dynamic", "compare"];

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

pub fn bundled(name: &str) -> Scenario {
    load_scenario(scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}
