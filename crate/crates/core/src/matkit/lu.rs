use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, stored packed.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let n = m.require_square("lu")?;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (pivot, best) = (k..n)
                .map(|r| (r, lu[(r, k)].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty");
            if best <= f64::EPSILON * scale * 1e-6 {
                return Err(Error::SingularMatrix);
            }
            if pivot != k {
                perm.swap(pivot, k);
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(pivot, c)];
                    lu[(pivot, c)] = tmp;
                }
            }
            let d = lu[(k, k)];
            for r in (k + 1)..n {
                let f = lu[(r, k)] / d;
                lu[(r, k)] = f;
                if f != ZERO {
                    for c in (k + 1)..n {
                        let u = lu[(k, c)];
                        lu[(r, c)] -= f * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.perm.len();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                let l = self.lu[(r, c)];
                let yc = y[c];
                y[r] -= l * yc;
            }
        }
        for r in (0..n).rev() {
            for c in (r + 1)..n {
                let u = self.lu[(r, c)];
                let yc = y[c];
                y[r] -= u * yc;
            }
            y[r] /= self.lu[(r, r)];
        }
        y
    }
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square("inverse")?;
    let lu = Lu::new(m)?;
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    for c in 0..n {
        e.iter_mut().for_each(|z| *z = ZERO);
        e[c] = ONE;
        inv.set_column(c, &lu.solve(&e));
    }
    Ok(inv)
}
