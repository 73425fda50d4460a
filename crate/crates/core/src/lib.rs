//! Canonical and subsystem temperatures of eigenstates in projector-embedded
//! spin-1/2 chains, and ensemble statistics comparing the exact product-state
//! scar with its thermal neighbours.

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod output;
pub mod spectral;
pub mod thermometry;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
