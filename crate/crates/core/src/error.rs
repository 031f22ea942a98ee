use thiserror::Error;

/// Errors raised by the geometric and entanglement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("singular operator: {0}")]
    Singular(&'static str),

    #[error("Kraus map has no nonzero operator")]
    EmptyKraus,

    #[error("Kraus map is degenerate (sum of A_i^dag A_i is not invertible)")]
    DegenerateMap,

    #[error("trace of the image is not positive ({0:e})")]
    NonPositiveTrace(f64),

    #[error("state is not pure (rank {0})")]
    NotPure(usize),

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("invalid signature: k+ + k- = {k} exceeds n = {n}")]
    InvalidSignature { k: usize, n: usize },

    #[error("invalid chart index: {0}")]
    InvalidChart(String),

    #[error("invalid tensor factorization: {0}")]
    InvalidFactorization(String),

    #[error("invalid subsystem subset: {0}")]
    InvalidSubset(String),

    #[error("matrix is not an isometry (residual {0:e})")]
    NotIsometry(f64),

    #[error("need at least 3 curve samples, got {0}")]
    TooFewSamples(usize),

    #[error("curve samples are not on a uniform grid")]
    NonUniformGrid,

    #[error("invalid projector mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid z vector: {0}")]
    InvalidZ(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
