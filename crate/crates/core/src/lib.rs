//! Two mutually incoherent weak coherent sources feeding a symmetric 4x4
//! fiber splitter: exact two-photon evolution, coincidence statistics,
//! post-selected two-qubit correlations, and a simple imperfection model.

pub mod correlations;
pub mod counts;
pub mod error;
pub mod fock;
pub mod interference;
pub mod noise;
pub mod sources;

pub use error::{Error, Result};
