//! Bound states of the Dirac equation under spin and pseudospin symmetry for
//! the Hellmann, Wei Hua and Varshni potentials, solved with the
//! Nikiforov-Uvarov method and cross-checked by finite differences.

pub mod cli;
pub mod error;
pub mod nu_core;
pub mod oracle;
pub mod potentials;
pub mod reduction;
pub mod spectra;
pub mod tables;
pub mod wavefunctions;

pub use error::{Error, Result};
