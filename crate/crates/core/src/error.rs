use thiserror::Error;

/// Errors raised by the computational routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("formula not applicable in this regime: {0}")]
    WrongRegime(String),
    #[error("non-integrable weight: {0}")]
    Singularity(String),
    #[error("malformed mesh specification: {0}")]
    Mesh(String),
    #[error("zero profile")]
    ZeroProfile,
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("monte carlo: {0}")]
    MonteCarlo(String),
}

pub type Result<T> = std::result::Result<T, HardyError>;
