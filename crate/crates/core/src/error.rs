use thiserror::Error;

/// Errors raised by the numerical routines and state constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (max |h - h^†| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("vectors are linearly dependent (|Gram determinant| = {0:e})")]
    RankDeficient(f64),
    #[error("operator is singular on the supplied range basis")]
    SingularOnRange,
    #[error("matrix is not complex-symmetric (max |t - t^T| = {0:e})")]
    NotSymmetric(f64),
    #[error("invalid ensemble weights: {0}")]
    InvalidWeights(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("state vector must have unit norm (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("theta = {0} lies outside [0, pi/2]")]
    ThetaOutOfRange(f64),
    #[error("theta = {0} is too close to 0 or pi/2: sin(2 theta) vanishes")]
    ThetaBoundary(f64),
    #[error("concurrence {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("state is not in the first entangled region (region: {0})")]
    NotRegion1(String),
    #[error("state is separable; there is no entangled pure part")]
    Separable,
    #[error("separable part is not on the separable boundary (lambda1 - lambda2 - lambda3 - lambda4 = {0:e})")]
    NotOnBoundary(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
