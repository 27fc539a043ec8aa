//! Shared fixtures for the benches.

use pushguide::config::{bundled, RunConfig};

pub fn bundled_config(name: &str) -> RunConfig {
    RunConfig::parse(bundled(name).expect("bundled config")).expect("valid config")
}
