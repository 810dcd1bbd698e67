//! Exact graded algebra, L-infinity structures, iterated integrals and
//! holonomies of flat connections, graph complexes and Casimir identities.

pub mod chen;
pub mod documents;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod functors;
pub mod graded;
pub mod graphs;
pub mod holonomy;
pub mod lie;
pub mod lin;
pub mod linalg;
pub mod linfty;
pub mod poly;
pub mod quadratic;
pub mod quadrature;
pub mod scalar;
pub mod selftest;
pub mod simplex;

pub use error::{Error, Result};
pub use graded::{GradedSpace, Word};
pub use lin::Lin;
pub use scalar::Scalar;
