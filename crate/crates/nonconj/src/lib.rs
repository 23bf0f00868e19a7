//! Non-conjugate subsystem decompositions on truncated Hilbert spaces: frames,
//! entropies, thermodynamic ledgers, unitary dynamics and model Hamiltonians.

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod frames;
pub mod gaussian;
pub mod models;
pub mod operator;
pub mod thermo;

pub use error::{Error, Result};
