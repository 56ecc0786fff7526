use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed system: {0}")]
    MalformedSystem(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid retraction: {0}")]
    InvalidRetraction(String),

    #[error("resource bound exceeded: {what} needs {needed}, limit is {limit}")]
    Resource {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("not a non-trivial witness: {0}")]
    NotAWitness(String),

    #[error("invalid scenario: rows {rows:?} have non-classical phase sums")]
    InvalidScenario { rows: Vec<usize> },

    #[error("basis error: {0}")]
    Basis(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    /// Short machine-readable tag, used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedSystem(_) => "malformed_system",
            Error::Domain(_) => "domain",
            Error::InvalidRetraction(_) => "invalid_retraction",
            Error::Resource { .. } => "resource",
            Error::Arity { .. } => "arity",
            Error::NotAWitness(_) => "not_a_witness",
            Error::InvalidScenario { .. } => "invalid_scenario",
            Error::Basis(_) => "basis",
            Error::Config(_) => "config",
            Error::InvalidInput(_) => "invalid_input",
            Error::Parse(_) => "parse",
            Error::Overflow(_) => "overflow",
        }
    }

    pub(crate) fn resource(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::Resource {
            what: what.into(),
            needed,
            limit,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
