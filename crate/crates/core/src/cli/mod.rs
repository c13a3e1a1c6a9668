//! Command-line front end: problem files, reports, and the randomized
//! verification harnesses behind the `compute`, `verify` and `inequalities`
//! subcommands.

mod compute;
mod harness;
pub mod problem;

use thiserror::Error;

use crate::error::Error;

pub use compute::{compute, ComputeOptions, ComputeReport, DivergenceEntry, RenyiEntry, RouteChoice};
pub use harness::{
    inequalities, random_trial, verification_catalog, verify, InequalityOptions, InequalityReport, InequalityTrial,
    RankPolicy, TrialCase, TrialDivergence, TrialRecord, VerifyOptions, VerifyReport, VerifySummary,
};
pub use problem::{parse_problem, Problem, ProblemFile};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for unreadable, malformed or invalid input.
pub const EXIT_INVALID: i32 = 1;
/// Exit status when a checked property fails.
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid {path}: {source}")]
    Validation { path: String, source: Error },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        let path = path.into();
        CliError::Parse { path: if path.is_empty() { ".".into() } else { path }, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID
    }
}

/// Reads and parses a problem file from disk.
pub fn load_problem(path: &std::path::Path) -> Result<Problem, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_problem(&bytes)
}

/// Writes a report as pretty JSON followed by a newline.
pub fn to_json<T: serde::Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}
