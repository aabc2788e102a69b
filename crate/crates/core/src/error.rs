use thiserror::Error;

/// Errors raised while ingesting data, building models or solving them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("instance rejected: {0}")]
    InstanceRejected(String),

    #[error("unsupported element: {0}")]
    Unsupported(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// A precondition that a correctly built model guarantees was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short machine-readable tag for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::InstanceRejected(_) => "instance_rejected",
            Error::Unsupported(_) => "unsupported",
            Error::Validation(_) => "validation",
            Error::Config(_) => "config",
            Error::Numeric(_) => "numeric",
            Error::Contract(_) => "contract",
            Error::Solver(_) => "solver",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
