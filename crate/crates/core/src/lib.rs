//! Quantifies competitive substitution between a new "killer" technology and
//! the established "victim" technology it displaces.
//!
//! Logarithms are natural throughout.

// `!(x > 0.0)` style checks are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimation;
pub mod ingest;
pub mod optimize;
pub mod plot;
pub mod report;
mod serde_float;
pub mod simulate;
pub mod substitution;
pub mod waves;

pub use error::{Error, Result};
