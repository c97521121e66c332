use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One failed invariant, addressed by field name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{field} = {value} is outside its domain ({expected})")]
    Domain {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid parameter set: {}", join(.0))]
    InvalidParameters(Vec<Violation>),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),
    #[error("no candidate satisfies the acreage constraints")]
    Infeasible,
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
