//! Invariant densities and measures of one-dimensional chaotic maps.

pub mod elliptic;
pub mod error;
pub mod maps;
pub mod exec;
pub mod quad;

pub use error::{Error, Result};
