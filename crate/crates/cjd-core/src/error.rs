//! Error types shared across the crate.

use alloc::string::String;
use core::fmt;

/// Construction-time validation failure of a system, measure, or config.
#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    /// An evaluator produced output of the wrong shape.
    Shape {
        what: String,
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A declared invariant does not hold (boundary condition, symmetry,
    /// positivity, spanning tree, parameter bound, ...).
    Invariant(String),
}

impl BuildError {
    pub fn invariant(msg: impl Into<String>) -> Self {
        BuildError::Invariant(msg.into())
    }
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Shape {
                what,
                expected,
                got,
            } => write!(
                f,
                "{what}: expected shape {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            BuildError::Invariant(msg) => write!(f, "invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for BuildError {}

/// Runtime failure during simulation or estimation.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// The state left the admissible region (norm above
    /// [`crate::DIVERGENCE_RADIUS`] or a non-finite coordinate).
    /// Carries the first time at which this was observed.
    Diverged { time: f64 },
    /// A configuration precondition failed (step size, horizon, ...).
    Config(String),
    /// A matrix that must admit a (right) inverse is numerically rank
    /// deficient.
    RankDeficient(String),
    /// A jump maps the unit sphere through the origin.
    DegenerateJump(String),
    /// Every path of an ensemble diverged; no estimate is possible.
    AllPathsDiverged,
    /// An estimator was given an empty sample set.
    Empty(String),
}

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Diverged { time } => {
                write!(f, "path diverged (non-finite or above guard) at t={time}")
            }
            SimError::Config(msg) => write!(f, "configuration error: {msg}"),
            SimError::RankDeficient(msg) => write!(f, "rank-deficient matrix: {msg}"),
            SimError::DegenerateJump(msg) => write!(f, "degenerate jump: {msg}"),
            SimError::AllPathsDiverged => write!(f, "all paths of the ensemble diverged"),
            SimError::Empty(msg) => write!(f, "empty input: {msg}"),
        }
    }
}

impl core::error::Error for SimError {}

impl From<BuildError> for SimError {
    fn from(e: BuildError) -> Self {
        SimError::Config(alloc::format!("{e}"))
    }
}
