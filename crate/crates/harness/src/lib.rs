//! Scenario driver for the `friedrichs` crate: configuration, the survival,
//! emission and correlation comparisons between total evolution and the
//! restricted pole amplitudes, pole reports, self-tests and file output.

pub mod config;
pub mod oracle;
pub mod report;
pub mod scenarios;
pub mod selftest;

use thiserror::Error;

pub use config::RunConfig;
pub use report::{Check, PoleRecord, ScenarioReport, Series};
pub use scenarios::{report_pole, run_correlation, run_emission, run_survival};
pub use selftest::{run_selftests, SelftestSummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] friedrichs::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit codes of the `friedrichs` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NUMERICAL: i32 = 2;
    pub const SELFTEST: i32 = 3;
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => exit::USAGE,
            HarnessError::Numerical(_) | HarnessError::Io(_) => exit::NUMERICAL,
        }
    }
}
