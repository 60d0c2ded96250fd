use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("agent index {index} out of range for {n} agents")]
    AgentOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time {t} outside [0, {total})")]
    TimeOutOfRange { t: usize, total: usize },

    #[error("numeric oracle failed: {0}")]
    OracleFailed(String),

    /// A theorem precondition does not hold for the requested run.
    #[error("precondition {check} failed: {detail}")]
    Precondition { check: &'static str, detail: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status: 3 for a theorem-precondition refusal, 2 for bad
    /// input, 1 for anything that went wrong at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precondition { .. } => 3,
            Error::InvalidParameter(_)
            | Error::AgentOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::TimeOutOfRange { .. }
            | Error::Config(_) => 2,
            Error::OracleFailed(_) | Error::Io(_) | Error::Csv(_) => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
