use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded for {what}: requested {requested}, limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error(
        "local factor series for p = {p} did not converge: tail bound {tail:e} vs value {value:e}"
    )]
    Truncation { p: u64, tail: f64, value: f64 },

    #[error(
        "contour rule unstable: {nodes} vs {doubled} nodes differ by {diff:e} (value {value:e})"
    )]
    ContourAccuracy {
        nodes: usize,
        doubled: usize,
        diff: f64,
        value: f64,
    },

    #[error("{0} is not squarefree")]
    NotSquarefree(u64),

    #[error("empty interval: {0}")]
    EmptyInterval(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
