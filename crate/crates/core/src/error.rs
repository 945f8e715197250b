use std::fmt;

use thiserror::Error;

use crate::family::Violation;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid family: {}", join_violations(.0))]
    InvalidFamily(Vec<Violation>),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node budget of {budget} exceeded ({explored} nodes explored)")]
    BudgetExceeded { budget: u64, explored: u64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

/// A parse failure in a family file. `line` is 1-based; 0 means the error
/// is not tied to a single line (e.g. a missing header or malformed JSON).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, reason: impl Into<String>) -> Self {
        ParseError {
            line,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "parse error: {}", self.reason)
        } else {
            write!(f, "parse error at line {}: {}", self.line, self.reason)
        }
    }
}
