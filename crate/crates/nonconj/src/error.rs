use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid factor index {index} for an operator with {count} factors")]
    FactorIndex { index: usize, count: usize },
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigendecomposition failed to converge")]
    Eigen,
    #[error("map is not complete (max deviation of sum K^dag K from identity {0:.3e})")]
    IncompleteMap(f64),
    #[error("selective outcome {index} has probability {p:.3e}")]
    ZeroProbability { index: usize, p: f64 },
    #[error("target energy {target} lies outside the attainable thermal range ({low}, {high}]")]
    EnergyOutOfRange { target: f64, low: f64, high: f64 },
    #[error("thermal energy curve is not strictly decreasing in beta")]
    NonMonotonic,
    #[error("composite dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },
    #[error("not a coarse-graining: {0}")]
    Grading(String),
    #[error("uncertainty relation violated (symplectic eigenvalue {0:.6e} < 1/2)")]
    Uncertainty(f64),
    #[error("coefficient matrix is not a valid quadratic form: {0}")]
    NonQuadratic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
