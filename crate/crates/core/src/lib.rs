//! Multi-oriented graph complexes with exact rational coefficients.

pub mod canon;
pub mod complex;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod hmap;
pub mod homology;
pub mod linalg;
pub mod sign;
pub mod skeleton;
pub mod special;
pub mod vector;

pub use canon::CanonicalClass;
pub use error::{Error, Result};
pub use graph::{ColoredGraph, Edge, GroupElement};
pub use sign::{Parity, Sign};
