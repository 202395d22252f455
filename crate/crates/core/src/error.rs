use thiserror::Error;

/// Errors produced by code construction, decoding and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed code file: {0}")]
    Format(String),

    #[error("unsupported format version: {0}")]
    Version(String),

    #[error("checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },

    #[error("stabilizer block is rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("unattainable target: {0}")]
    Unattainable(String),

    #[error("internal assertion failed: {0}")]
    Assertion(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 usage or validation, 3 I/O, 4 internal assertion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::Csv(e) if e.is_io_error() => 3,
            Error::Json(e) if e.is_io() => 3,
            Error::Assertion(_) | Error::Singular(_) => 4,
            _ => 2,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
