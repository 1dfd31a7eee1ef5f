use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration that can never be run: dimension mismatch, empty support,
    /// violated sample-size precondition, malformed table.
    #[error("configuration error: {0}")]
    Config(String),

    /// A call-site argument is out of range for the operation.
    #[error("argument error: {0}")]
    Argument(String),

    /// An exhaustive computation was requested over a domain that is too large.
    #[error("size cap exceeded: {what} has size {size}, cap is {cap}")]
    SizeCap { what: String, size: u128, cap: u128 },

    /// A metered example source ran out of draws.
    #[error("sample budget exhausted after {used} draws (budget {budget})")]
    SampleBudget { used: u64, budget: u64 },

    /// A wrapped learner failed to produce a hypothesis.
    #[error("learner failure: {0}")]
    Learner(String),

    /// The booster skipped too many rounds.
    #[error("boosting failed: {skipped} of {rounds} rounds skipped")]
    BoostFailure { skipped: usize, rounds: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
