use serde::{Deserialize, Serialize};

use super::eigen::eig_hermitian;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Scalar function applied to a Hermitian matrix through its spectrum.
///
/// Each variant knows its derivative, which the function-commutator defect needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Identity,
    Constant {
        value: f64,
    },
    Exp,
    /// `exp(i k x)`
    ExpI {
        k: f64,
    },
    Power {
        exponent: i32,
    },
    Sin,
    Cos,
    /// `1/x`
    Reciprocal,
}

impl ScalarFn {
    /// `None` when the function is undefined or non-finite at `x`.
    pub fn eval(&self, x: f64) -> Option<C64> {
        let v = match *self {
            ScalarFn::Identity => C64::new(x, 0.0),
            ScalarFn::Constant { value } => C64::new(value, 0.0),
            ScalarFn::Exp => C64::new(x.exp(), 0.0),
            ScalarFn::ExpI { k } => C64::from_polar(1.0, k * x),
            ScalarFn::Power { exponent } => {
                if exponent < 0 && x == 0.0 {
                    return None;
                }
                C64::new(x.powi(exponent), 0.0)
            }
            ScalarFn::Sin => C64::new(x.sin(), 0.0),
            ScalarFn::Cos => C64::new(x.cos(), 0.0),
            ScalarFn::Reciprocal => {
                if x == 0.0 {
                    return None;
                }
                C64::new(1.0 / x, 0.0)
            }
        };
        (v.re.is_finite() && v.im.is_finite()).then_some(v)
    }

    pub fn derivative(&self, x: f64) -> Option<C64> {
        let v = match *self {
            ScalarFn::Identity => C64::new(1.0, 0.0),
            ScalarFn::Constant { .. } => C64::new(0.0, 0.0),
            ScalarFn::Exp => C64::new(x.exp(), 0.0),
            ScalarFn::ExpI { k } => C64::new(0.0, k) * C64::from_polar(1.0, k * x),
            ScalarFn::Power { exponent } => {
                if exponent == 0 {
                    C64::new(0.0, 0.0)
                } else {
                    if exponent < 1 && x == 0.0 {
                        return None;
                    }
                    C64::new(exponent as f64 * x.powi(exponent - 1), 0.0)
                }
            }
            ScalarFn::Sin => C64::new(x.cos(), 0.0),
            ScalarFn::Cos => C64::new(-x.sin(), 0.0),
            ScalarFn::Reciprocal => {
                if x == 0.0 {
                    return None;
                }
                C64::new(-1.0 / (x * x), 0.0)
            }
        };
        (v.re.is_finite() && v.im.is_finite()).then_some(v)
    }
}

/// `V diag(f(λ)) V†` for Hermitian `a`.
pub fn matrix_function(a: &ComplexMatrix, f: &ScalarFn) -> Result<ComplexMatrix> {
    apply_spectral(a, |x| f.eval(x))
}

/// `V diag(f'(λ)) V†` for Hermitian `a`.
pub fn matrix_function_derivative(a: &ComplexMatrix, f: &ScalarFn) -> Result<ComplexMatrix> {
    apply_spectral(a, |x| f.derivative(x))
}

pub(crate) fn apply_spectral(
    a: &ComplexMatrix,
    f: impl Fn(f64) -> Option<C64>,
) -> Result<ComplexMatrix> {
    let e = eig_hermitian(a)?;
    let n = e.dim();
    let values = e
        .eigenvalues
        .iter()
        .map(|l| f(l.re).ok_or(Error::SingularEvaluation { at: l.re }))
        .collect::<Result<Vec<_>>>()?;
    let v = &e.eigenvectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += v[(r, k)] * values[k] * v[(c, k)].conj();
            }
            out[(r, c)] = s;
        }
    }
    Ok(out)
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square("commutator")?;
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            op: "commutator",
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.checked_sub(&ba)
}
