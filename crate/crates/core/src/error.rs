use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0:?} is a declared singularity of the field")]
    SingularPoint(Vec<f64>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("finite-difference stencil at {0:?} leaves the grid box")]
    BoundaryPoint(Vec<f64>),
    #[error("point {0:?} lies outside the grid box")]
    OutsideGrid(Vec<f64>),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("norm estimate inconclusive: {0}")]
    NormInconclusive(String),
    #[error("inner integral {0:e} is below the machine floor")]
    ZeroDenominator(f64),
    #[error("points are closer than the grid resolution ({0:e})")]
    PairTooClose(f64),
    #[error("config error: {0}")]
    Config(String),
}
