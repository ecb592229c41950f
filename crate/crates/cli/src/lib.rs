//! Command-line front end for `ontic-core`: scenario configs, reproduction
//! of the standard qubit cases, and entropy sweeps.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod app;
pub mod cases;
pub mod checks;
pub mod config;
pub mod report;
pub mod sweep;

pub use app::{run, Cli, Outcome};
