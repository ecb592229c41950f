//! Numerics for ontological models of a qubit.
//!
//! - [`qcore`]: pure states, density matrices, POVMs, entropy, Bloch geometry.
//! - [`hs_model`]: epistemic states as measures over pure states and their
//!   image under the map to density matrices.
//! - [`onto_model`]: response functions, Born consistency, classification.
//! - [`contextual`]: per-context distributions and entropies.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contextual;
pub mod error;
pub mod hs_model;
pub mod onto_model;
pub mod qcore;
pub mod quadrature;

pub use error::{Error, Result};
