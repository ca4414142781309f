use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("square root of negative number {0}")]
    NegativeSqrt(String),
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("closed form is only defined for n >= 1")]
    ClosedFormIndexZero,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
