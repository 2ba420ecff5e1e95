//! Simulate two-body qudit Hamiltonians using a fixed entangling resource
//! Hamiltonian and single-qudit unitaries.
//!
//! The pipeline runs [`pauli`] → [`clifford`] → [`compiler`] → [`sim`] →
//! [`verify`], with [`decoupling`] handling systems of more than two qudits.

pub mod cli;
pub mod clifford;
pub mod compiler;
pub mod decoupling;
pub mod error;
pub mod io;
pub mod linalg;
pub mod majorization;
pub mod modular;
pub mod pauli;
pub mod random;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
