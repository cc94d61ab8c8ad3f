use thiserror::Error;

/// Failures of the numerical geometry routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("matrix is not positive definite (least eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{what} must be a unit vector, got norm {norm}")]
    NotUnit { what: &'static str, norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("tensor must carry the kahler symmetry tag")]
    NotKahler,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("fiber direction has zero chart coordinate")]
    Chart,
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("failed to bracket the root of the defining equation")]
    Bracket,
}
