//! Independent dense oracles built on nalgebra, shared by the integration tests.
#![allow(dead_code)]

use fdqm_core::matkit::{ComplexMatrix, C64};
use nalgebra::DMatrix;

pub fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// `I ⊗ A − Bᵀ ⊗ I`, the column-stacked form of `X ↦ A X − X B`.
pub fn kron_operator(a: &ComplexMatrix, b: &ComplexMatrix) -> DMatrix<C64> {
    let (a, b) = (to_na(a), to_na(b));
    let ia = DMatrix::<C64>::identity(b.nrows(), b.nrows());
    let ib = DMatrix::<C64>::identity(a.nrows(), a.nrows());
    ia.kronecker(&a) - b.transpose().kronecker(&ib)
}

fn vec_columns(k: &ComplexMatrix) -> nalgebra::DVector<C64> {
    let na = to_na(k);
    nalgebra::DVector::from_iterator(na.len(), na.iter().copied())
}

/// `min_X ‖A X − X B − K‖_F` by SVD least squares.
pub fn sylvester_lsq(a: &ComplexMatrix, b: &ComplexMatrix, k: &ComplexMatrix) -> f64 {
    let l = kron_operator(a, b);
    let rhs = vec_columns(k);
    let svd = l.clone().svd(true, true);
    let top = svd.singular_values.max();
    let x = svd
        .solve(&rhs, 1e-10 * top.max(f64::MIN_POSITIVE))
        .expect("svd solve");
    (l * x - rhs).norm()
}

/// Smallest singular value of `X ↦ A X − X B`.
pub fn sylvester_sigma_min(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    kron_operator(a, b).singular_values().min()
}
