use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {op}: expected {expected}, got {got}")]
    Shape {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("size limit exceeded in {op}: {entries} entries exceeds the limit of {limit}")]
    Size {
        op: &'static str,
        entries: usize,
        limit: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{op} did not converge within {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("impossible outcome{}: probability {probability:e} is below the cutoff", outcome.map(|m| format!(" {m}")).unwrap_or_default())]
    ImpossibleOutcome {
        outcome: Option<usize>,
        probability: f64,
    },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("ledger conflict: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(op: &'static str, expected: impl Into<String>, got: impl Into<String>) -> Error {
    Error::Shape {
        op,
        expected: expected.into(),
        got: got.into(),
    }
}
