use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("code dimension {dim} exceeds the enumeration bound {bound}")]
    DimensionTooLarge { dim: usize, bound: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("edge ({var}, {check}) is not in the graph")]
    EdgeNotInGraph { var: usize, check: usize },

    #[error("computation tree is not tree-like")]
    NotTreeLike,

    #[error("no LLR supplied for tree variable {var}")]
    MissingLlr { var: usize },

    #[error("observation does not match channel kind")]
    ObservationMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exhaustive enumeration requires a finite-output channel")]
    ContinuousChannel,

    #[error("empty index set")]
    EmptyIndexSet,

    #[error("alist parse error: {0}")]
    AlistParse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
