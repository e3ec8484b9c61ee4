//! Seeded, round-based simulator for LEACH and residual-energy weighted
//! LEACH cluster-head election in homogeneous wireless sensor networks.

pub mod cli;
pub mod election;
pub mod engine;
pub mod metrics;
pub mod model;
pub mod radio;

pub use engine::{place_nodes, run_simulation, NetworkState, RoundReport};
pub use metrics::{compare_runs, ComparisonTable, LifetimeMarkers, RunSummary};
pub use model::{validate_config, ScenarioConfig, ValidatedConfig};
