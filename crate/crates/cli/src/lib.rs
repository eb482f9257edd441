//! Config-driven runs of the holocontact checks with JSON reports.
//!
//! A run reads a [`RunConfig`] (TOML), dispatches on its task and returns a
//! [`ReportDocument`]. Exit status: 0 verified or completed, 1 refuted,
//! 2 inconclusive, 3 input error.

mod config;
mod report;
mod run;

pub use config::{Coord, CurvatureSpec, GridAxis, GridSpec, RunConfig, Task, DEFAULT_SEED, DEFAULT_TOLERANCE};
pub use report::{CurvatureEntry, NamedResidual, RecursionEntry, ReportDocument, Status, Summary, TaskResult, SCHEMA};
pub use run::{run, run_with_env};

/// Problem with the configuration or its contents; maps to exit status 3.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl From<holocontact::Error> for InputError {
    fn from(e: holocontact::Error) -> Self {
        InputError(e.to_string())
    }
}

pub const EXIT_INPUT: i32 = 3;
