use thiserror::Error;

use crate::grid::Side;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected a {expected}-side field")]
    SideMismatch { expected: Side },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation is undefined for the zero field")]
    ZeroField,

    #[error("unsupported dimension: {0}")]
    Dimension(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("ensemble member `{id}` failed: {source}")]
    Member {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
