use thiserror::Error;

/// Crate-wide error type.
///
/// Construction-time presentation defects, undecidable queries and broken
/// invariants are all reported through this enum; no operation silently
/// returns a wrong value.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("presentation is not confluent: {0}")]
    NonConfluentPresentation(String),

    #[error("undecidable in this presentation: {0}")]
    Undecidable(String),

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("ring does not support this operation: {0}")]
    UnsupportedRing(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("section is not a cogenerator: {0}")]
    NotACogenerator(String),

    #[error("Tate-Oort constant is not a unit: {0}")]
    NonUnitW(String),

    #[error("valuations admit no fiber type: {0}")]
    InvalidValuations(String),

    #[error("map does not respect relations: {0}")]
    RelationViolation(String),

    #[error("parse error at {line}:{col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },

    #[error("name error: {0}")]
    NameError(String),

    #[error("type error: {0}")]
    TypeError(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }

    pub fn type_err(msg: impl Into<String>) -> Self {
        Error::TypeError(msg.into())
    }

    /// Exit code class for the CLI: parse/validation errors are 2,
    /// everything else surfaces as a failing verdict (exit 1).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ParseError { .. } | Error::NameError(_) | Error::TypeError(_)
        )
    }
}
