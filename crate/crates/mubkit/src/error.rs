use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Structure size below 2.
    #[error("invalid dimension {0}: need at least 2")]
    InvalidDimension(usize),

    /// Galois field characteristic is not prime.
    #[error("invalid characteristic {0}: not a prime")]
    InvalidCharacteristic(usize),

    /// Structure size exceeds the table bound.
    #[error("size {0} exceeds the supported maximum {1}")]
    TooLarge(usize, usize),

    /// Element has no multiplicative inverse.
    #[error("label {0} has no multiplicative inverse")]
    NoInverse(usize),

    /// Matrix/vector shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Arguments outside the operation's domain (wrong structure, non-Hermitian
    /// input, mismatched operands).
    #[error("domain error: {0}")]
    Domain(String),

    /// Label or index out of range.
    #[error("index {index} out of range for size {size}")]
    Index { index: usize, size: usize },

    /// Eigendecomposition could not separate eigenvalues after retries.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    /// Duplicate measurement-derived coefficients disagree beyond tolerance.
    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    /// Measurement table does not cover the required bases.
    #[error("incomplete data: {0}")]
    IncompleteData(String),

    /// Projection produced a (numerically) zero state.
    #[error("degenerate projection: collapsed norm {0:.3e}")]
    DegenerateProjection(f64),

    /// Malformed input file or JSON payload.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
