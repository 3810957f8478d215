use thiserror::Error;

/// Errors raised by the library. Budget exhaustion is kept distinct so the
/// command-line driver can map it onto its own exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("cannot combine an ambient matrix with a quotient matrix")]
    ModeMismatch,

    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(i128),

    #[error("matrix is not in SL2: determinant is {0}")]
    NotUnimodular(String),

    #[error("{what} exceeded budget of {limit}")]
    Budget { what: String, limit: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(crate::group::Hypothesis),

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("invalid permutation representation: {0}")]
    InvalidRep(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: u64) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
