//! Characteristic classes and curvature positivity checks for projective
//! bundles, Fubini-Study metrics and Hopf surfaces.

// Index loops mirror the tensor notation.
#![allow(clippy::needless_range_loop)]

pub mod classes;
pub mod curvature;
mod error;
pub mod expr;
pub mod extremal;
pub mod fd;
pub mod hopf;
pub mod linalg;
pub mod metric;
pub mod tautological;
pub mod tensor;

pub use error::GeomError;
