//! Distortion lower bounds for scalar source codes whose decoder observes
//! side information.
//!
//! A code maps each source symbol to one of `M` cells; the decoder combines
//! the cell index with a side-information symbol `Y` produced by a discrete
//! memoryless channel. Lower bounds on the achievable distortion come from
//! data-processing inequalities for generalized mutual information `I^Q`,
//! where `Q` is a convex, non-increasing functional. Achievable points come
//! from exhaustive code search and a Wyner–Ziv rate-distortion surrogate.

pub mod capacity;
pub mod codes;
pub mod error;
pub mod experiments;
pub mod gmi;
pub mod model;
pub mod partition;
pub mod rd;
pub mod wz;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
