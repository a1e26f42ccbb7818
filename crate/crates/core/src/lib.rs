//! Desk-scale toolkit for variance of arithmetic sequences in progressions:
//! exact variance functionals, circle-method arc dissection, smoothed sieve
//! weights, Dirichlet-series residue predictions, and the lower-bound chains
//! that tie them together.

pub mod arith;
pub mod circle;
pub mod dirichlet;
pub mod error;
pub mod numeric;
pub mod pipeline;
pub mod variance;
pub mod verify;
pub mod windows;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
