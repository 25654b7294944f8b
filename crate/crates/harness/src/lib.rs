//! Scenario generation, verification runs and reports for `pushmatch`.
//!
//! The `pushmatch` binary wraps this library; the same functions back the
//! acceptance tests.

pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod scenario;
pub mod verify;

pub use config::Config;
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOptions};
pub use report::{emit_report, load_report, Format, MethodEntry, Report, ScenarioRecord, Verdict};
pub use scenario::{generate_scenario, Scenario, ScenarioFile, ScenarioKind, ScenarioParams};
pub use verify::{verify_theorems, exit_code};

/// Environment variable capping the worker threads; 0 or unset means one
/// per core.
pub const THREADS_ENV: &str = "PUSHMATCH_THREADS";

/// Thread count requested through [`THREADS_ENV`].
pub fn requested_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| HarnessError::ConfigParse(format!("{THREADS_ENV}={v} is not a thread count"))),
    }
}
