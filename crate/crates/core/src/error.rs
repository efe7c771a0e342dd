use thiserror::Error;

/// Errors raised by the algebra kernel, the metric/contraction machinery and
/// the solver. Verification failures are reported as data, never as errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("element is not Hermitian: asymmetry {asymmetry:e} exceeds {bound:e}")]
    NotHermitian { asymmetry: f64, bound: f64 },

    #[error("certificate norm not < 1: ||A|| = {norm}")]
    CertificateInvalid { norm: f64 },

    #[error("weight not positive: minimum eigenvalue {min_eigenvalue}")]
    WeightNotPositive { min_eigenvalue: f64 },

    #[error("iterate diverged at step {iteration}: non-finite coordinate")]
    Divergence { iteration: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
