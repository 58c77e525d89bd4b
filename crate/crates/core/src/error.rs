use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid interferometer: {0}")]
    InvalidInterferometer(String),

    #[error("{n} photons exceeds the permutation-sum capacity of {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("geometric phase undefined at visibility {visibility:e}")]
    UndefinedPhase { visibility: f64 },

    #[error("adjacent vertices {0} and {1} are antipodal; the connecting geodesic is not unique")]
    AntipodalEdge(usize, usize),

    #[error("numerical residue {residue:e} exceeds tolerance {tolerance:e}")]
    NumericalResidue { residue: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
