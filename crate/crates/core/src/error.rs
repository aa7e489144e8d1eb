use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("deformation data fails the compatibility conditions: {0}")]
    WellDefinedness(String),

    #[error("input is curved but an uncurved structure was required: {0}")]
    CurvedInput(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("component is not free: {0}")]
    NonFreeComponent(String),

    #[error("module is not cofree: {0}")]
    NotCofree(String),

    #[error("missing internal weights: {0}")]
    MissingWeights(String),

    #[error("degree bound exceeded: {0}")]
    DegreeOverflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
