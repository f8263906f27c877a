//! Ehrenfest-relation residuals, force operators and the function-commutator defect.
//!
//! All norms are Frobenius. The residuals use the adjoint-aware forms
//! `i m (H†x − xH) = ℏp` and `i (H†p − pH) = −ℏU′(x)`, which reduce to the usual
//! commutator relations for Hermitian `H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{potential_on_grid, PotentialSpec};
use crate::matkit::{
    commutator, matrix_function, matrix_function_derivative, ComplexMatrix, ScalarFn, C64,
};
use crate::operators::OperatorPair;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `‖i m (H†x − xH) − ℏp‖_F`
    pub r1: f64,
    /// `‖i (H†p − pH) + ℏU′(x)‖_F`
    pub r2: f64,
    pub r1_rel: f64,
    pub r2_rel: f64,
    /// `‖ℏp‖_F`
    pub scale1: f64,
    /// `‖ℏU′(x)‖_F`
    pub scale2: f64,
    pub hermitian_input: bool,
}

fn relative(r: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        if r == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        r / scale
    }
}

fn check_dims(h: &ComplexMatrix, pair: &OperatorPair) -> Result<usize> {
    let n = h.require_square("ehrenfest_residuals")?;
    if n != pair.dim() {
        return Err(Error::DimensionMismatch {
            op: "ehrenfest_residuals",
            left: (n, n),
            right: (pair.dim(), pair.dim()),
        });
    }
    Ok(n)
}

/// `H†A − AH`
fn adjoint_commutator(h: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(&h.adjoint().matmul(a)? - &a.matmul(h)?)
}

/// First-relation residual and its scale `‖ℏp‖_F`; needs no potential.
pub fn first_residual(h: &ComplexMatrix, pair: &OperatorPair) -> Result<(f64, f64)> {
    check_dims(h, pair)?;
    let hbar = pair.hbar();
    let c = adjoint_commutator(h, &pair.x_op)?.scale(C64::new(0.0, pair.mass()));
    let hp = pair.p_op.scale_real(hbar);
    Ok(((&c - &hp).frobenius_norm(), hp.frobenius_norm()))
}

pub fn ehrenfest_residuals(
    h: &ComplexMatrix,
    pair: &OperatorPair,
    potential: &PotentialSpec,
) -> Result<ResidualReport> {
    let (r1, scale1) = first_residual(h, pair)?;
    let hbar = pair.hbar();
    let (_, du) = potential_on_grid(potential, &pair.x_values())?;
    let force = ComplexMatrix::from_real_diagonal(&du.iter().map(|d| hbar * d).collect::<Vec<_>>());
    let c = adjoint_commutator(h, &pair.p_op)?.scale(C64::new(0.0, 1.0));
    let r2 = (&c + &force).frobenius_norm();
    let scale2 = force.frobenius_norm();
    Ok(ResidualReport {
        r1,
        r2,
        r1_rel: relative(r1, scale1),
        r2_rel: relative(r2, scale2),
        scale1,
        scale2,
        hermitian_input: h.is_hermitian(),
    })
}

/// `ℏ |trace U′(x)| / √N`: no Hermitian `H` can push `r2` below this.
pub fn trace_obstruction(pair: &OperatorPair, potential: &PotentialSpec) -> Result<f64> {
    let (_, du) = potential_on_grid(potential, &pair.x_values())?;
    Ok(pair.hbar() * du.iter().sum::<f64>().abs() / (du.len() as f64).sqrt())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForceOperators {
    /// `−U′(x)`
    pub f1: ComplexMatrix,
    /// `i [U(x), p] / ℏ`
    pub f2: ComplexMatrix,
    /// `‖F1 − F2‖_F`
    pub gap: f64,
}

pub fn force_operators(pair: &OperatorPair, potential: &PotentialSpec) -> Result<ForceOperators> {
    let (u, du) = potential_on_grid(potential, &pair.x_values())?;
    let f1 = ComplexMatrix::from_real_diagonal(&du.iter().map(|d| -d).collect::<Vec<_>>());
    let f2 = commutator(&ComplexMatrix::from_real_diagonal(&u), &pair.p_op)?
        .scale(C64::new(0.0, 1.0 / pair.hbar()));
    let gap = (&f1 - &f2).frobenius_norm();
    Ok(ForceOperators { f1, f2, gap })
}

/// The `k` values probed for `exp(ikA)`: −2, −1.9, …, 2.
pub fn default_k_grid() -> Vec<f64> {
    (-20..=20).map(|j| j as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSample {
    pub k: f64,
    /// `‖[exp(ikA), B] − ik exp(ikA)‖_F`
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDefect {
    /// `‖[f(A), B] − f′(A)‖_F`
    pub defect: f64,
    pub k_samples: Vec<KSample>,
    /// Minimum over `k ≠ 0`; at `k = 0` both terms vanish identically.
    pub min_defect_nonzero_k: f64,
    /// Minimum of `defect_k / |k|` over `k ≠ 0`, which stays bounded away from zero
    /// as `k → 0` when the relation fails.
    pub min_scaled_defect: f64,
}

pub fn function_commutator_defect(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    f: &ScalarFn,
) -> Result<FunctionDefect> {
    function_commutator_defect_on(a, b, f, &default_k_grid())
}

pub fn function_commutator_defect_on(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    f: &ScalarFn,
    ks: &[f64],
) -> Result<FunctionDefect> {
    let fa = matrix_function(a, f)?;
    let dfa = matrix_function_derivative(a, f)?;
    let defect = (&commutator(&fa, b)? - &dfa).frobenius_norm();
    let mut k_samples = Vec::with_capacity(ks.len());
    let mut min_defect_nonzero_k = f64::INFINITY;
    let mut min_scaled_defect = f64::INFINITY;
    for &k in ks {
        let e = matrix_function(a, &ScalarFn::ExpI { k })?;
        let d = (&commutator(&e, b)? - &e.scale(C64::new(0.0, k))).frobenius_norm();
        if k != 0.0 {
            min_defect_nonzero_k = min_defect_nonzero_k.min(d);
            min_scaled_defect = min_scaled_defect.min(d / k.abs());
        }
        k_samples.push(KSample { k, defect: d });
    }
    Ok(FunctionDefect {
        defect,
        k_samples,
        min_defect_nonzero_k,
        min_scaled_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_h_mub, build_h_star};
    use crate::matkit::random::{random_complex, random_hermitian};
    use crate::matkit::sylvester_obstruction;
    use crate::operators::{build_fd_momentum, build_mub_pair, GridSpec, MomentumLabels};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig1_pair() -> OperatorPair {
        build_mub_pair(&GridSpec::half_line(30, 0.145).with_labels(MomentumLabels::Symmetric))
            .unwrap()
    }

    #[test]
    fn star_satisfies_first_but_not_second() {
        let pair = fig1_pair();
        let pot = PotentialSpec::singular_oscillator(10.0, 1.0);
        let h = build_h_star(&pair, &pot).unwrap();
        let r = ehrenfest_residuals(&h.matrix, &pair, &pot).unwrap();
        assert!(r.hermitian_input);
        assert!(r.r1_rel <= 1e-10);
        assert!(r.r2_rel > 0.01);
    }

    #[test]
    fn mub_violates_first() {
        let pair = fig1_pair();
        let pot = PotentialSpec::singular_oscillator(10.0, 1.0);
        let h = build_h_mub(&pair, &pot).unwrap();
        let r = ehrenfest_residuals(&h.matrix, &pair, &pot).unwrap();
        assert!(r.r1_rel > 0.01);
    }

    #[test]
    fn free_kinetic_hamiltonian() {
        let pair = fig1_pair();
        let h = build_h_mub(&pair, &PotentialSpec::free()).unwrap();
        let r = ehrenfest_residuals(&h.matrix, &pair, &PotentialSpec::free()).unwrap();
        assert!(r.r2 <= 1e-10 * pair.p_op.frobenius_norm().powi(3));
        assert!(r.r1 > 0.0);
        assert_eq!(r.r2_rel, if r.r2 == 0.0 { 0.0 } else { f64::INFINITY });
    }

    #[test]
    fn second_residual_respects_trace_bound() {
        for n in [4, 10, 30] {
            let grid = GridSpec::half_line(n, 0.145).with_labels(MomentumLabels::Symmetric);
            let pot = PotentialSpec::singular_oscillator(10.0, 1.0);
            let mub = build_mub_pair(&grid).unwrap();
            let fd = build_fd_momentum(&grid).unwrap();
            let bound = trace_obstruction(&mub, &pot).unwrap();
            let builds = [
                build_h_mub(&mub, &pot).unwrap(),
                build_h_star(&mub, &pot).unwrap(),
                build_h_star(&fd, &pot).unwrap(),
            ];
            for b in builds {
                let r = ehrenfest_residuals(&b.matrix, &b.pair, &pot).unwrap();
                assert!(r.r2 >= bound - 1e-9 * r.scale2, "N={n} {:?}", b.kind);
            }
        }
    }

    #[test]
    fn forces_agree_only_for_free_particle() {
        let pair = build_fd_momentum(&GridSpec::half_line(8, 0.5)).unwrap();
        let f = force_operators(&pair, &PotentialSpec::free()).unwrap();
        assert_eq!(f.gap, 0.0);
        assert!(f.f1.is_zero());

        let f = force_operators(&pair, &PotentialSpec::linear(1.0)).unwrap();
        assert_eq!(f.f1, ComplexMatrix::from_real_diagonal(&[-1.0; 8]));
        // i[diag(x), p_fd] is tridiagonal with −1/2 on both neighbours and zero diagonal.
        for k in 0..8 {
            assert!(f.f2[(k, k)].norm() < 1e-15);
            if k + 1 < 8 {
                assert!((f.f2[(k, k + 1)] - C64::new(-0.5, 0.0)).norm() < 1e-14);
                assert!((f.f2[(k + 1, k)] - C64::new(-0.5, 0.0)).norm() < 1e-14);
            }
        }
        assert!(f.gap > 0.0);
        assert!(f.f2.is_hermitian());
    }

    #[test]
    fn singular_oscillator_forces_differ() {
        let f =
            force_operators(&fig1_pair(), &PotentialSpec::singular_oscillator(10.0, 1.0)).unwrap();
        assert!(f.gap > 0.0);
        assert!(f.f1.is_hermitian() && f.f2.is_hermitian());
    }

    #[test]
    fn constant_function_has_no_defect() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 4);
        let b = random_complex(&mut rng, 4, 4);
        let d = function_commutator_defect(&a, &b, &ScalarFn::Constant { value: 2.5 }).unwrap();
        assert!(d.defect <= 1e-12 * b.frobenius_norm());
    }

    #[test]
    fn identity_relation_is_unreachable() {
        for n in 2..=10 {
            let a =
                ComplexMatrix::from_real_diagonal(&(0..n).map(|k| k as f64).collect::<Vec<_>>());
            let r = sylvester_obstruction(&a, &a, &ComplexMatrix::identity(n)).unwrap();
            assert!((r.residual - (n as f64).sqrt()).abs() < 1e-12);
            // B = 0 attains the bound.
            let d =
                function_commutator_defect(&a, &ComplexMatrix::zeros(n, n), &ScalarFn::Identity)
                    .unwrap();
            assert!((d.defect - (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_defect_is_positive_and_k_family_bracketed() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_hermitian(&mut rng, 4);
        let b = random_complex(&mut rng, 4, 4);
        let d = function_commutator_defect(&a, &b, &ScalarFn::Exp).unwrap();
        assert!(d.defect > 0.0);
        assert_eq!(d.k_samples.len(), 41);
        let zero = d.k_samples.iter().find(|s| s.k == 0.0).unwrap();
        assert!(zero.defect < 1e-12);
        assert!(d.min_defect_nonzero_k > 0.0);
        assert!(d.min_scaled_defect > 0.0);
    }
}
