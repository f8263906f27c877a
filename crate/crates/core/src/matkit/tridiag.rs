//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues by Sturm-sequence bisection, eigenvectors by inverse iteration.
//! Each level is independent, so the batch runs through [`crate::exec`].

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};

#[derive(Clone, Debug)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[k]` couples rows `k` and `k + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal needs off.len() + 1 == diag.len() > 0 (got {} and {})",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let left = if k > 0 { self.off[k - 1].abs() } else { 0.0 };
            let right = if k + 1 < n { self.off[k].abs() } else { 0.0 };
            lo = lo.min(self.diag[k] - left - right);
            hi = hi.max(self.diag[k] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for k in 1..self.dim() {
            let denom = if q == 0.0 {
                f64::EPSILON * self.off[k - 1].abs().max(1.0)
            } else {
                q
            };
            q = self.diag[k] - x - self.off[k - 1] * self.off[k - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th smallest eigenvalue (zero-based).
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let width = (hi - lo).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * width;
        hi += 1e-12 * width;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for an eigenvalue estimate, by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let (glo, ghi) = self.gershgorin();
        let shift = lambda + 1e-13 * (ghi - glo).max(1.0);
        let mut v: Vec<f64> = (0..n)
            .map(|k| 1.0 + 0.1 * ((k * 7919) % 13) as f64)
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            normalize(&mut v);
        }
        // Positive first lobe: sign of the first component that reaches 1e-3 of the peak.
        let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() >= 1e-3 * peak) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        v
    }

    /// Solves `(T − shift) y = b` by tridiagonal elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        let guard = |x: f64| if x == 0.0 { tiny } else { x };
        if n == 1 {
            return vec![b[0] / guard(self.diag[0] - shift)];
        }
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let piv = guard(d[i]);
                d[i] = piv;
                let fact = dl[i] / piv;
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        d[n - 1] = guard(d[n - 1]);

        let mut y = b.to_vec();
        for i in 0..n - 1 {
            if swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= dl[i] * y[i];
        }
        y[n - 1] /= d[n - 1];
        y[n - 2] = (y[n - 2] - du[n - 2] * y[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            y[i] = (y[i] - du[i] * y[i + 1] - du2[i] * y[i + 2]) / d[i];
        }
        y
    }

    /// Lowest `count` eigenpairs, ascending.
    pub fn lowest(&self, count: usize, exec: Execution) -> (Vec<f64>, Vec<Vec<f64>>) {
        let count = count.min(self.dim());
        let pairs = map_indexed(exec, count, |k| {
            let lambda = self.eigenvalue(k);
            (lambda, self.eigenvector(lambda))
        });
        pairs.into_iter().unzip()
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        // Eigenvalues 2 − 2cos(kπ/(n+1)).
        let n = 50;
        let t = laplacian(n);
        let (vals, vecs) = t.lowest(5, Execution::Sequential);
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "k={k}: {v} vs {exact}");
        }
        for (k, vec) in vecs.iter().enumerate() {
            let theta = (k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            let mut exact: Vec<f64> = (0..n).map(|j| ((j + 1) as f64 * theta).sin()).collect();
            normalize(&mut exact);
            let dot: f64 = vec.iter().zip(&exact).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
            assert!(dot > 0.0);
        }
    }

    #[test]
    fn sturm_count_brackets() {
        let t = laplacian(10);
        assert_eq!(t.count_below(-0.1), 0);
        assert_eq!(t.count_below(4.1), 10);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }
}
