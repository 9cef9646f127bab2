use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: unknown ids, bad lengths, unparsable documents.
    #[error("input error: {0}")]
    Input(String),

    /// An operation was called outside its precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no path between {from} and {to}")]
    NoPath { from: String, to: String },

    /// A certified bound (typically an epsilon upper bound) turned out to be
    /// too small for the hypotheses of a decomposition step.
    #[error("certification failure: {0}")]
    Certification(String),

    /// Exploration did not reach the requested tolerance within the horizon.
    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("no compatible sequence: {0}")]
    NoSequence(String),

    #[error("cycle census cap of {cap} exceeded")]
    CapExceeded { cap: usize },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn certification(msg: impl Into<String>) -> Self {
        Error::Certification(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Contract(_) | Error::NoPath { .. } => 2,
            Error::Certification(_)
            | Error::Budget(_)
            | Error::NoSequence(_)
            | Error::CapExceeded { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
