//! Config-driven scenario runner for the coupled jump-diffusion engine.
//!
//! The binary (`cjd`) parses a sectioned key=value scenario file, dispatches
//! to one of the built-in experiments, and writes plot-ready CSV files plus
//! a run manifest. Reruns with the same config and seed produce byte-
//! identical CSVs.

pub mod config;
pub mod manifest;
pub mod output;
pub mod scenarios;

use std::fmt;

/// Runner errors carrying their process exit code:
/// parse errors exit 2, validation errors 3, fatal runtime divergence 4,
/// and I/O problems 1.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Runtime(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Runtime(_) => "runtime",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Runtime(m)
            | CliError::Io(m) => m,
        }
    }

    /// The single machine-readable error line printed to stderr.
    pub fn machine_line(&self) -> String {
        format!(
            "error code={} kind={} msg={:?}",
            self.exit_code(),
            self.kind(),
            self.message()
        )
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<cjd_core::SimError> for CliError {
    fn from(e: cjd_core::SimError) -> Self {
        match e {
            cjd_core::SimError::Diverged { .. } | cjd_core::SimError::AllPathsDiverged => {
                CliError::Runtime(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<cjd_core::BuildError> for CliError {
    fn from(e: cjd_core::BuildError) -> Self {
        CliError::Validation(e.to_string())
    }
}
