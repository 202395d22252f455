//! Quantum random linear codes and guessing-based decoding.

pub mod analytics;
pub mod cli;
pub mod clifford;
pub mod code;
pub mod decoder;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod noise;
pub mod pauli;

pub use error::{Error, Result};
