use thiserror::Error;

/// Errors raised by the simulator and the protocol driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A measurement branch was requested whose Born probability is numerically zero.
    #[error("degenerate measurement branch (probability {probability:e})")]
    DegenerateBranch { probability: f64 },

    #[error("protocol aborted: {0}")]
    ProtocolAbort(String),

    #[error("insufficient shares: {0}")]
    InsufficientShares(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
