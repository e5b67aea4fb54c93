//! Exact-arithmetic construction of finite covers of punctured surfaces,
//! monodromy lifting, and first Betti numbers of mapping tori over orbifold
//! closures.
//!
//! Everything is computed over Z and Q with certificates: covers are
//! transitive permutation representations with validated Euler
//! characteristics, lifts are verified intertwiners, homology actions are
//! cross-checked against an independent HNN-presentation oracle, and every
//! headline inequality is re-verified before a report is emitted.

pub mod cover;
pub mod error;
pub mod exact;
pub mod fpgroup;
pub mod homology;
pub mod pipeline;
pub mod selftest;
pub mod triangle;

pub use error::{Error, Result};
