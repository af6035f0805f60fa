//! Library surface of the scenario runner, used by the binary and the
//! integration tests.

pub mod runner;
pub mod scenario;

pub use runner::{run_scenario, RunOptions, RunSummary, TaskStatus, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATIONS};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
