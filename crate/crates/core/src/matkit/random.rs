//! Random test-instance generators shared by unit tests, benches and the no-go batch.

use rand::Rng;

use super::matrix::{ComplexMatrix, C64};

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; avoids an extra dependency for one distribution.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(gauss(rng), gauss(rng)))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-ish unitary from the Q factor of modified Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_complex(rng, n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    for c in 0..n {
        let mut v = g.column(c);
        for k in 0..c {
            let qk = q.column(k);
            let dot: C64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(&qk) {
                *vi -= dot * qi;
            }
        }
        let norm = super::matrix::vec_norm(&v);
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        q.set_column(c, &v);
    }
    q
}

/// Real vector with entries spread apart by at least `min_gap`, shuffled.
pub fn spread_values<R: Rng + ?Sized>(rng: &mut R, n: usize, min_gap: f64) -> Vec<f64> {
    let mut acc = rng.gen_range(-2.0..0.0);
    let mut vals: Vec<f64> = (0..n)
        .map(|_| {
            acc += min_gap + rng.gen_range(0.0..1.0);
            acc
        })
        .collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        vals.swap(i, j);
    }
    vals
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}
