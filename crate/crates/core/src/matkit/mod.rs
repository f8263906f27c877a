//! Dense complex matrix kernel.

mod eigen;
mod funcs;
mod lu;
mod matrix;
pub mod random;
mod sylvester;
mod tridiag;

pub use eigen::{
    eig_general, eig_hermitian, fix_phase, schur, EigenDecomposition, DEFECTIVE_CONDITION,
};
pub use funcs::{commutator, matrix_function, matrix_function_derivative, ScalarFn};
pub use lu::{inverse, Lu};
pub use matrix::{frobenius_norm, hermitian_tolerance, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use sylvester::{
    sylvester_apply, sylvester_obstruction, sylvester_obstruction_with_gap, sylvester_residual,
    ObstructionResult, ResonantEntry, RESONANCE_REL,
};
pub use tridiag::SymTridiagonal;
