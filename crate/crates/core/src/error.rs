use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrataError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("not generic within tolerance: {0}")]
    NotGeneric(String),
    #[error("extraction inconsistency: {0}")]
    ExtractionInconsistency(String),
    #[error("no seed found for stratum {0}")]
    SeedFailure(String),
    #[error("continuation left the stratum: {0}")]
    BoundaryFailure(String),
    #[error("ill-conditioned modulus Jacobian: {0}")]
    Conditioning(String),
}

pub type Result<T> = std::result::Result<T, StrataError>;

impl StrataError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Self::NumericFailure(msg.into())
    }

    pub(crate) fn not_generic(msg: impl Into<String>) -> Self {
        Self::NotGeneric(msg.into())
    }
}
