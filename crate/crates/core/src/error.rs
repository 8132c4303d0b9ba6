use thiserror::Error;

pub type Result<T> = std::result::Result<T, QbcError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QbcError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: norm deviates from 1 by {deviation:e}")]
    NotNormalized { deviation: f64 },

    #[error("operator is not Hermitian: max deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("operator trace deviates from 1 by {deviation:e}")]
    TraceNotOne { deviation: f64 },

    #[error("operator is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator is not unitary: max deviation of U^dag U from identity {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("basis is not orthonormal: max Gram deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("concealing condition violated: residual {residual:e}")]
    ConditionFailed { residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed scheme document: {0}")]
    Parse(String),
}
