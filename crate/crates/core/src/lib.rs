//! Exact computational algebra for operads in chain complexes: symmetric
//! sequences with their three monoidal products, operads and their
//! (bi)modules, co-rings, the diffraction of level comonoids, bar and cobar
//! constructions, and the induction/linearization correspondence between
//! module-level and multiplicative morphisms.
//!
//! Everything is computed exactly over Z, Z/p or Q on explicitly
//! enumerated bases, truncated by level and degree.

pub mod scalar;
pub mod perm;
pub mod label;
pub mod matrix;
pub mod snf;
pub mod chain;
pub mod sym;
pub mod operad;
pub mod diffract;

pub use scalar::{Ring, RingKind, Scalar};
