//! Orthogonality graphs over finite fields.
//!
//! Builds the projective and affine orthogonality graphs over F_q^d, checks
//! their square identities in exact integer arithmetic, and counts ordered
//! k-tuples of distinct mutually orthogonal vectors in vertex subsets, with
//! closed-form predictions to compare against.

pub mod bits;
pub mod cli;
pub mod count;
pub mod error;
pub mod field;
pub mod graph;
pub mod lab;
pub mod linear;
pub mod spectral;

pub use error::{Error, Result};
