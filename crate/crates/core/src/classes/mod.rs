//! Exact characteristic-class arithmetic on products of projective spaces and
//! on one level of projectivization.

mod bundle;
mod graded;
mod proj;

use thiserror::Error;

pub use bundle::{total_chern, BundleClass, BundleDesc, SegreVerdict};
pub use graded::{BasePresentation, GradedClass, Monomial};
pub use proj::{ProjBundleRing, ProjClass, Relation};

pub(crate) use graded::format_rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("line bundle has {found} degrees but the base has {expected} factors")]
    BaseMismatch { expected: usize, found: usize },
    #[error("tensor of two higher-rank bundles is not supported")]
    UnsupportedTensor,
    #[error("bundle rank must be positive")]
    InvalidRank,
    #[error("invalid total Chern class: {0}")]
    InvalidChernClass(String),
    #[error("empty bundle descriptor")]
    EmptyDescriptor,
}
