//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("degenerate triangular parameterization (all parameters zero)")]
    DegenerateParams,

    #[error("degenerate loss: {0}")]
    DegenerateLoss(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty basis pair {signal_basis}/{idler_basis}: four-outcome sum is zero")]
    EmptyBasis {
        signal_basis: String,
        idler_basis: String,
    },

    #[error("zero total seed intensity for seed polarization {0}")]
    ZeroSeedIntensity(String),

    #[error("zero renormalization group sum for group {0}")]
    ZeroGroupSum(String),

    #[error("measurement operators do not span the state space (Gram rank {rank} < {needed})")]
    Underdetermined { rank: usize, needed: usize },

    #[error("incomplete records: {0}")]
    IncompleteRecords(String),

    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code category used by the CLI: 2 usage/config, 3 data,
    /// 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::Io(_) => 2,
            Error::Data { .. }
            | Error::Json(_)
            | Error::EmptyBasis { .. }
            | Error::ZeroSeedIntensity(_)
            | Error::ZeroGroupSum(_)
            | Error::IncompleteRecords(_) => 3,
            _ => 4,
        }
    }
}
