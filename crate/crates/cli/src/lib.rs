//! Experiment driver: specs, sweeps, a resumable results store and
//! collapse fits of the aggregate tables.

pub mod aggregate;
pub mod commands;
pub mod fss;
pub mod spec;
pub mod store;

use tricode_core::analysis::AnalysisError;

/// Invalid experiment spec, flag or input file. Exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(String);

impl ConfigError {
    pub fn new(msg: String) -> Self {
        Self(msg)
    }
}

/// Crate version with the git revision it was built from, when known.
pub const VERSION: &str = env!("TRICODE_VERSION");

pub fn version() -> String {
    VERSION.to_string()
}

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;

/// Process exit code for an error: 2 for config errors, 3 for analysis
/// errors, 1 otherwise.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<ConfigError>() {
            return EXIT_CONFIG;
        }
        if cause.is::<AnalysisError>() {
            return EXIT_ANALYSIS;
        }
    }
    EXIT_FAILURE
}
