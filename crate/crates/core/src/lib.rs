//! Finite-dimensional position, momentum and Hamiltonian operators, with
//! commutator-residual diagnostics for the Ehrenfest relations, numerical
//! witnesses for the associated no-go results, and an exact singular-oscillator
//! reference.

pub mod calogero;
pub mod ehrenfest;
pub mod error;
pub mod exec;
pub mod figures;
pub mod hamiltonians;
pub mod matkit;
pub mod nogo;
pub mod operators;
pub mod stepopt;

pub use error::{Error, Result};
pub use exec::Execution;
