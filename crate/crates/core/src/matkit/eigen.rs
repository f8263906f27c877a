//! Dense eigensolvers.
//!
//! Hermitian input goes through cyclic complex Jacobi rotations. General input is
//! reduced to upper Hessenberg form by Householder reflections and then to complex
//! Schur form by single-shift QR with Wilkinson shifts; eigenvectors come from
//! back-substitution on the triangular factor.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::lu;
use super::matrix::{hermitian_tolerance, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvector-matrix condition number above which a matrix counts as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e8;

const JACOBI_MAX_SWEEPS: usize = 100;
const QR_MAX_ITER_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenDecomposition {
    /// Ascending by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
    /// True when the eigenvector matrix is unitary (Hermitian input).
    pub unitary: bool,
    /// Frobenius condition estimate `‖V‖_F ‖V⁻¹‖_F / N` (1 for unitary `V`).
    pub condition: f64,
}

impl EigenDecomposition {
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Inverse of the eigenvector matrix (the adjoint when unitary).
    pub fn inverse_vectors(&self) -> Result<ComplexMatrix> {
        if self.unitary {
            Ok(self.eigenvectors.adjoint())
        } else {
            lu::inverse(&self.eigenvectors)
        }
    }

    /// `V diag(λ) V⁻¹`.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let n = self.dim();
        let mut vd = self.eigenvectors.clone();
        for r in 0..n {
            for c in 0..n {
                vd[(r, c)] *= self.eigenvalues[c];
            }
        }
        vd.matmul(&self.inverse_vectors()?)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and ascending. Each eigenvector is scaled so that its
/// largest-magnitude component is real and positive; among components whose
/// magnitudes agree to 1e-10 relative, the lowest index wins.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.require_square("eig_hermitian")?;
    let defect = m.hermiticity_defect();
    let tolerance = hermitian_tolerance(m);
    if defect > tolerance {
        return Err(Error::NotHermitian { defect, tolerance });
    }

    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::new(m[(r, r)].re, 0.0)
        } else {
            0.5 * (m[(r, c)] + m[(c, r)].conj())
        }
    });
    let mut v = ComplexMatrix::identity(n);
    jacobi_sweeps(&mut a, &mut v)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&k| C64::new(a[(k, k)].re, 0.0)).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        unitary: true,
        condition: 1.0,
    })
}

fn off_diagonal_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi_sweeps(a: &mut ComplexMatrix, v: &mut ComplexMatrix) -> Result<()> {
    let n = a.dim();
    let total = a.frobenius_norm();
    if total == 0.0 {
        return Ok(());
    }
    let target = (1e-15 * total).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm_sqr(a) <= target {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip entries already negligible next to both diagonal entries.
                if r < 1e-300 || (app.abs() + r == app.abs() && aqq.abs() + r == aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Unitary G on the (p, q) plane:
                // G_pp = c, G_pq = s, G_qp = -s·conj(phase), G_qq = c·conj(phase).
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -s * phase.conj();
                let gqq = c * phase.conj();
                // A <- A G (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                }
                // A <- G† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    if off_diagonal_norm_sqr(a) <= target * 1e4 {
        Ok(())
    } else {
        Err(Error::NoConvergence {
            op: "eig_hermitian",
            iterations: JACOBI_MAX_SWEEPS,
        })
    }
}

/// Scales `v` by a unit phase so its largest-magnitude component is real positive.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .expect("non-empty");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

fn cmp_complex(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigendecomposition of a general square matrix.
///
/// Hermitian input is routed to [`eig_hermitian`]. Otherwise right eigenvectors
/// have unit 2-norm and the same phase convention. A matrix whose eigenvector
/// matrix has condition estimate above [`DEFECTIVE_CONDITION`] is rejected.
pub fn eig_general(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.require_square("eig_general")?;
    if m.is_hermitian() {
        return eig_hermitian(m);
    }
    let (t, q) = schur(m)?;
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let lambdas: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();

    // Right eigenvectors of the triangular factor.
    let mut y = ComplexMatrix::zeros(n, n);
    let small = f64::EPSILON * scale;
    for k in 0..n {
        let lambda = lambdas[k];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut vecs = q.matmul(&y)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| cmp_complex(&lambdas[i], &lambdas[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<C64> = order.iter().map(|&k| lambdas[k]).collect();
    let mut sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vecs.column(src);
        let norm = vec_norm(&col);
        for z in col.iter_mut() {
            *z /= norm;
        }
        fix_phase(&mut col);
        sorted.set_column(dst, &col);
    }
    vecs = sorted;

    let condition = match lu::inverse(&vecs) {
        Ok(inv) => vecs.frobenius_norm() * inv.frobenius_norm() / n as f64,
        Err(_) => f64::INFINITY,
    };
    if !(condition <= DEFECTIVE_CONDITION) {
        return Err(Error::NotDiagonalizable { condition });
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vecs,
        unitary: false,
        condition,
    })
}

/// Complex Schur form `M = Q T Q†` with `T` upper triangular.
pub fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = m.require_square("schur")?;
    let (mut h, mut q) = hessenberg(m);
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok((h, q));
    }

    let mut hi = n - 1;
    let mut iter = 0;
    let mut total_iter = 0;
    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let diag = if diag == 0.0 { norm } else { diag };
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total_iter += 1;
        if total_iter > QR_MAX_ITER_PER_EIGENVALUE * n {
            return Err(Error::NoConvergence {
                op: "schur",
                iterations: total_iter,
            });
        }

        // Wilkinson shift from the trailing 2x2 block; exceptional shift every 10 sweeps.
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mut mu = if iter % 10 == 0 {
            d + C64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr * 0.25 - det).sqrt();
            let l1 = tr * 0.5 + disc;
            let l2 = tr * 0.5 - disc;
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        if !mu.re.is_finite() || !mu.im.is_finite() {
            mu = d;
        }

        // Implicit single-shift QR sweep on rows/cols lo..=hi via Givens rotations.
        let mut x = h[(lo, lo)] - mu;
        let mut z = h[(lo + 1, lo)];
        for k in lo..hi {
            let (cs, sn) = givens(x, z);
            // Apply G† from the left to rows k, k+1.
            for j in (if k > lo { k - 1 } else { lo })..n {
                let h1 = h[(k, j)];
                let h2 = h[(k + 1, j)];
                h[(k, j)] = cs * h1 + sn * h2;
                h[(k + 1, j)] = -sn.conj() * h1 + cs * h2;
            }
            // Apply G from the right to columns k, k+1.
            let row_end = (k + 2).min(hi) + 1;
            for i in 0..row_end {
                let h1 = h[(i, k)];
                let h2 = h[(i, k + 1)];
                h[(i, k)] = cs * h1 + sn.conj() * h2;
                h[(i, k + 1)] = -sn * h1 + cs * h2;
            }
            for i in 0..n {
                let q1 = q[(i, k)];
                let q2 = q[(i, k + 1)];
                q[(i, k)] = cs * q1 + sn.conj() * q2;
                q[(i, k + 1)] = -sn * q1 + cs * q2;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                z = h[(k + 2, k)];
            }
        }
    }
    // Clean the strictly lower part.
    for r in 1..n {
        for c in 0..r {
            h[(r, c)] = ZERO;
        }
    }
    Ok((h, q))
}

/// Complex Givens pair with real cosine: `[c s; -s̄ c] [x; z] = [r; 0]`.
fn givens(x: C64, z: C64) -> (C64, C64) {
    let xn = x.norm();
    let zn = z.norm();
    if zn == 0.0 {
        return (ONE, ZERO);
    }
    if xn == 0.0 {
        return (ZERO, z.conj() / zn);
    }
    let r = xn.hypot(zn);
    let c = xn / r;
    let s = (x / xn) * z.conj() / r;
    (C64::new(c, 0.0), s)
}

/// Householder reduction to upper Hessenberg form: `M = Q H Q†`.
fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.dim();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = ((k + 1)..n).map(|r| h[(r, k)]).collect();
        let alpha = vec_norm(&v);
        if alpha == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        v[0] += phase * alpha;
        let vn = vec_norm(&v);
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- (I - 2vv†) H
        for c in 0..n {
            let mut s = ZERO;
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, c)];
            }
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= 2.0 * vi * s;
            }
        }
        // H <- H (I - 2vv†), Q <- Q (I - 2vv†)
        for r in 0..n {
            let mut s = ZERO;
            let mut sq = ZERO;
            for (i, vi) in v.iter().enumerate() {
                s += h[(r, k + 1 + i)] * vi;
                sq += q[(r, k + 1 + i)] * vi;
            }
            for (i, vi) in v.iter().enumerate() {
                h[(r, k + 1 + i)] -= 2.0 * s * vi.conj();
                q[(r, k + 1 + i)] -= 2.0 * sq * vi.conj();
            }
        }
        for r in (k + 2)..n {
            h[(r, k)] = ZERO;
        }
    }
    (h, q)
}
