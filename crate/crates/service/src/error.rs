use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    /// Well-formed request that breaks a rule of the loop (HTTP 422).
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NotFound(String),
    /// Replayed request id or a state saved under another configuration.
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Model(#[from] nextpm::Error),
    #[error("state file: {0}")]
    Io(#[from] std::io::Error),
    #[error("state file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;
