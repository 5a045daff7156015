//! Scenario files, sweeps and CSV output for the `tmss` command.

pub mod config;
pub mod output;
pub mod scenario;

pub use config::{ConfigError, ScenarioConfig, Solver};
pub use scenario::{run_scenario, ResultRow, METRIC_COLUMNS};
