//! Bounds on the critical coupling of attractive central potentials.
//!
//! For `V(r) = -g v(r/R) ħ²/(2mR²)` the critical coupling `g_c` is the
//! smallest `g` at which channel `ℓ` supports a zero-energy bound state.
//! This crate computes lower limits (kernel traces and moment conditions),
//! an upper limit, and two independent numerical values of `g_c` itself.

pub mod error;
pub mod dsl;
pub mod quadrature;
pub mod potentials;
pub mod kernel;
pub mod optimize;
pub mod necessary;
pub mod sufficient;
pub mod exact;
pub mod reference;
pub mod cli;

pub use error::{Error, Result};
