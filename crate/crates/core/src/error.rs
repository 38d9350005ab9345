use thiserror::Error;

/// Errors produced by every stage of the mining pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed CSV input. `row` is 1-based and counts the header as row 1.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("value {value:?} is not in the domain of feature {feature:?}")]
    Domain { feature: String, value: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("cannot parse rule token {token:?}: {message}")]
    RuleParse { token: String, message: String },

    #[error("invalid sankey graph: {0}")]
    Graph(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
