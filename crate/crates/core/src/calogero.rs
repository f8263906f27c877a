//! Singular oscillator `U(x) = ω²x²/8 + g/(4x²)` on the half-line (ℏ = m = 1).
//!
//! Mapping onto the radial oscillator with `Ω = ω/2` and `l(l+1) = g/2` gives
//!
//! ```text
//! E_n  = Ω (2n + 1 + √(1+2g)/2)
//! ψ_n  = C_n x^{l+1} e^{−Ωx²/2} L_n^{(l+1/2)}(Ωx²),   C_n² = 2 Ω^{α+1} n! / Γ(n+α+1)
//! ```
//!
//! The closed forms are cross-checked against a dense finite-difference
//! diagonalization ([`reference_spectrum`]).

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::hamiltonians::{eval_potential, fd_star_tridiagonal, PotentialShape, PotentialSpec};
use crate::matkit::C64;
use crate::operators::GridSpec;

/// Generalized Laguerre polynomial `L_n^{(α)}(y)` by the three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, y: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - y;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - y) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalogeroSolution {
    pub omega: f64,
    pub g: f64,
    pub l_eff: f64,
    /// `ω/2`
    pub big_omega: f64,
}

impl CalogeroSolution {
    pub fn new(omega: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coupling g must be >= 0 (supercritical attraction unsupported), got {g}"
            )));
        }
        Ok(Self {
            omega,
            g,
            l_eff: (-1.0 + (1.0 + 2.0 * g).sqrt()) / 2.0,
            big_omega: omega / 2.0,
        })
    }

    /// Laguerre parameter `l + 1/2`.
    pub fn alpha(&self) -> f64 {
        self.l_eff + 0.5
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.big_omega * (2.0 * n as f64 + 1.0 + (1.0 + 2.0 * self.g).sqrt() / 2.0)
    }

    pub fn energies(&self, count: usize) -> Vec<f64> {
        (0..count).map(|n| self.energy(n)).collect()
    }

    fn ln_norm(&self, n: usize) -> f64 {
        let a = self.alpha();
        0.5 * (2f64.ln() + (a + 1.0) * self.big_omega.ln() + ln_gamma(n as f64 + 1.0)
            - ln_gamma(n as f64 + a + 1.0))
    }

    /// `ψ_n(x)` for `x > 0`; positive near the origin.
    pub fn eigenfunction_at(&self, n: usize, x: f64) -> f64 {
        let y = self.big_omega * x * x;
        let envelope = (self.ln_norm(n) + (self.l_eff + 1.0) * x.ln() - 0.5 * y).exp();
        envelope * laguerre(n, self.alpha(), y)
    }

    pub fn eigenfunction(&self, n: usize, xs: &[f64]) -> Result<Vec<f64>> {
        if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "eigenfunction needs x > 0, got {x}"
            )));
        }
        Ok(xs.iter().map(|&x| self.eigenfunction_at(n, x)).collect())
    }

    pub fn potential(&self) -> PotentialSpec {
        PotentialSpec::singular_oscillator(self.omega, self.g)
    }
}

pub fn exact_energies(omega: f64, g: f64, n_max: usize) -> Result<Vec<f64>> {
    Ok(CalogeroSolution::new(omega, g)?.energies(n_max))
}

pub fn exact_eigenfunction(omega: f64, g: f64, n: usize, xs: &[f64]) -> Result<Vec<f64>> {
    CalogeroSolution::new(omega, g)?.eigenfunction(n, xs)
}

/// `√a·ψ_n(x_k)` on a uniform grid, rescaled to unit Euclidean norm.
pub fn discrete_samples(sol: &CalogeroSolution, n: usize, grid: &GridSpec) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = sol
        .eigenfunction(n, &grid.x_values())?
        .iter()
        .map(|p| p * grid.a.sqrt())
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok(v)
}

/// Index of the first lobe: the first local maximum of `|v|` that reaches
/// `1e-3` of the peak (tiny tails before it are noise).
pub fn first_lobe_index<T: Copy>(v: &[T], modulus: impl Fn(T) -> f64) -> Option<usize> {
    let m: Vec<f64> = v.iter().map(|&z| modulus(z)).collect();
    let peak = m.iter().fold(0.0_f64, |a, &b| a.max(b));
    if peak == 0.0 {
        return None;
    }
    (0..m.len()).find(|&k| {
        m[k] >= 1e-3 * peak
            && (k == 0 || m[k] >= m[k - 1])
            && (k + 1 == m.len() || m[k] >= m[k + 1])
    })
}

/// Flips a real vector so its first lobe is positive.
pub fn align_first_lobe(v: &mut [f64]) {
    if let Some(k) = first_lobe_index(v, f64::abs) {
        if v[k] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Rotates a complex vector so its first-lobe component is real positive.
/// Returns the vector normalized to unit norm.
pub fn align_complex_first_lobe(v: &[C64]) -> Vec<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let Some(k) = first_lobe_index(v, |z: C64| z.norm()) else {
        return v.to_vec();
    };
    let phase = v[k].conj() / v[k].norm();
    v.iter().map(|z| z * phase / norm).collect()
}

/// `|Σ_k s_k conj(v_k)|` for unit-normalized `s` (real samples) and `v`.
pub fn overlap(samples: &[f64], v: &[C64]) -> f64 {
    let ns = samples.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if ns == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let dot: C64 = samples.iter().zip(v).map(|(s, z)| z.conj() * *s).sum();
    dot.norm() / (ns * nv)
}

/// Count of sign changes, ignoring samples below `1e-10` of the peak.
pub fn sign_changes(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x.abs() <= 1e-10 * peak {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageWarning {
    /// Grid span in turning-point radii of the highest computed level.
    pub coverage: f64,
    pub required: f64,
    pub allowed_region: (f64, f64),
}

/// Required grid span, in turning-point radii.
pub const REQUIRED_COVERAGE: f64 = 6.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceSpectrum {
    pub grid: GridSpec,
    pub energies: Vec<f64>,
    /// Unit-norm real eigenvectors, first lobe positive.
    pub eigenvectors: Vec<Vec<f64>>,
    pub coverage: f64,
    pub warning: Option<CoverageWarning>,
    /// `(4E(a) − E(2a))/3` from a companion grid with half the points at twice the
    /// step and the same left wall; removes the leading `O(a²)` error.
    pub richardson: Option<Vec<f64>>,
}

/// Lowest `count` levels of the three-point finite-difference Hamiltonian on the
/// half-line grid `x_k = a(k+1)`, with Dirichlet walls at `0` and `(N+1)a`.
/// Accurate to `O(a²)`.
pub fn reference_spectrum(
    potential: &PotentialSpec,
    n_ref: usize,
    a_ref: f64,
    count: usize,
    exec: Execution,
) -> Result<ReferenceSpectrum> {
    reference_spectrum_on(potential, &GridSpec::half_line(n_ref, a_ref), count, exec)
}

/// As [`reference_spectrum`] on an arbitrary uniform grid. The stencil diagonal
/// `ℏ²/(ma²)` is added on top of `potential.c`, so the levels approximate the
/// continuum operator `p²/2m + U + C`.
pub fn reference_spectrum_on(
    potential: &PotentialSpec,
    grid: &GridSpec,
    count: usize,
    exec: Execution,
) -> Result<ReferenceSpectrum> {
    let kinetic = grid.hbar * grid.hbar / (grid.mass * grid.a * grid.a);
    let shifted = potential.clone().with_c(potential.c + kinetic);
    let t = fd_star_tridiagonal(grid, &shifted)?;
    let (energies, mut eigenvectors) = t.lowest(count, exec);
    eigenvectors.iter_mut().for_each(|v| align_first_lobe(v));
    let top = energies.last().copied().unwrap_or(0.0) - potential.c;
    let (coverage, region) = turning_coverage(potential, grid, top)?;
    let warning = (coverage < REQUIRED_COVERAGE).then_some(CoverageWarning {
        coverage,
        required: REQUIRED_COVERAGE,
        allowed_region: region,
    });
    let richardson = if grid.n / 2 >= 3 && grid.n / 2 >= count {
        let coarse_grid = GridSpec {
            n: grid.n / 2,
            a: 2.0 * grid.a,
            x_offset: grid.x_offset + grid.a,
            ..*grid
        };
        let coarse_kinetic = grid.hbar * grid.hbar / (grid.mass * coarse_grid.a * coarse_grid.a);
        let coarse = fd_star_tridiagonal(
            &coarse_grid,
            &potential.clone().with_c(potential.c + coarse_kinetic),
        )?;
        let values = map_indexed(exec, energies.len(), |k| coarse.eigenvalue(k));
        Some(
            energies
                .iter()
                .zip(&values)
                .map(|(f, c)| (4.0 * f - c) / 3.0)
                .collect(),
        )
    } else {
        None
    };
    Ok(ReferenceSpectrum {
        grid: *grid,
        energies,
        eigenvectors,
        coverage,
        warning,
        richardson,
    })
}

/// Grid span in units of the turning-point radius: the largest distance from the
/// potential minimum to the edge of `{x : U(x) ≤ E}`. Zero when the allowed region
/// reaches the end of the grid.
fn turning_coverage(
    potential: &PotentialSpec,
    grid: &GridSpec,
    energy: f64,
) -> Result<(f64, (f64, f64))> {
    let xs = grid.x_values();
    let us = xs
        .iter()
        .map(|&x| eval_potential(potential, x).map(|(u, _)| u))
        .collect::<Result<Vec<_>>>()?;
    let allowed: Vec<usize> = (0..xs.len()).filter(|&k| us[k] <= energy).collect();
    let (Some(&first), Some(&last)) = (allowed.first(), allowed.last()) else {
        return Ok((f64::INFINITY, (energy, energy)));
    };
    let region = (xs[first], xs[last]);
    // A singular wall at the origin confines the state on its own.
    let open_left =
        first == 0 && !matches!(potential.shape, PotentialShape::SingularOscillator { .. });
    if last + 1 == xs.len() || open_left {
        return Ok((0.0, region));
    }
    let bottom = (0..xs.len())
        .min_by(|&i, &j| us[i].total_cmp(&us[j]))
        .map_or(xs[0], |k| xs[k]);
    let radius = (region.1 - bottom).max(bottom - region.0).max(grid.a);
    let span = xs[xs.len() - 1] - xs[0] + 2.0 * grid.a;
    Ok((span / radius, region))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub a: f64,
    /// `|E_k^ref − E_k^exact|` for each requested level.
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    /// `log2(err(a) / err(a/2))` for consecutive refinements, per level.
    pub orders: Vec<Vec<f64>>,
}

/// Reference-vs-exact errors at fixed span `L` for `N ∈ sizes` (with `a = L/(N+1)`).
pub fn convergence_study(
    sol: &CalogeroSolution,
    span: f64,
    sizes: &[usize],
    levels: usize,
    exec: Execution,
) -> Result<ConvergenceStudy> {
    let exact = sol.energies(levels);
    let points = sizes
        .iter()
        .map(|&n| {
            let a = span / (n + 1) as f64;
            let r = reference_spectrum(&sol.potential(), n, a, levels, exec)?;
            Ok(ConvergencePoint {
                n,
                a,
                errors: r
                    .energies
                    .iter()
                    .zip(&exact)
                    .map(|(e, x)| (e - x).abs())
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let orders = points
        .windows(2)
        .map(|w| {
            let ratio = w[0].a / w[1].a;
            w[0].errors
                .iter()
                .zip(&w[1].errors)
                .map(|(e0, e1)| (e0 / e1).ln() / ratio.ln())
                .collect()
        })
        .collect();
    Ok(ConvergenceStudy { points, orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_orders() {
        for &(alpha, y) in &[(0.0, 0.3), (0.5, 1.0), (2.7, 4.2)] {
            assert_eq!(laguerre(0, alpha, y), 1.0);
            assert!((laguerre(1, alpha, y) - (1.0 + alpha - y)).abs() < 1e-15);
            let l2 = y * y / 2.0 - (alpha + 2.0) * y + (alpha + 1.0) * (alpha + 2.0) / 2.0;
            assert!((laguerre(2, alpha, y) - l2).abs() < 1e-13);
        }
        // y²/2 − (α+2)y + (α+1)(α+2)/2 at α = 0.5, y = 1.
        assert!((laguerre(2, 0.5, 1.0) + 0.125).abs() < 1e-14);
    }

    #[test]
    fn energies() {
        let e = exact_energies(10.0, 0.0, 3).unwrap();
        assert!((e[0] - 7.5).abs() < 1e-14);
        let e = exact_energies(10.0, 1.0, 10).unwrap();
        assert!((e[0] - 9.330127018922193).abs() < 1e-12);
        for w in e.windows(2) {
            assert!((w[1] - w[0] - 10.0).abs() < 1e-12);
        }
        assert!(exact_energies(10.0, -0.1, 3).is_err());
        let small = exact_energies(10.0, 1e-8, 5).unwrap();
        let zero = exact_energies(10.0, 0.0, 5).unwrap();
        for (a, b) in small.iter().zip(&zero) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn g_zero_ground_state_shape() {
        let sol = CalogeroSolution::new(10.0, 0.0).unwrap();
        let xs = [0.1, 0.4, 0.9];
        let psi = sol.eigenfunction(0, &xs).unwrap();
        let shape: Vec<f64> = xs.iter().map(|x| x * (-5.0 * x * x / 2.0).exp()).collect();
        let r0 = psi[0] / shape[0];
        for (p, s) in psi.iter().zip(&shape) {
            assert!((p / s - r0).abs() < 1e-12 * r0);
        }
    }

    #[test]
    fn rejects_non_positive_x() {
        assert!(exact_eigenfunction(10.0, 1.0, 0, &[0.5, 0.0]).is_err());
    }

    /// Composite Simpson rule on `[0, L]`.
    fn simpson(f: impl Fn(f64) -> f64, l: f64, m: usize) -> f64 {
        let h = l / m as f64;
        let mut s = f(0.0) + f(l);
        for j in 1..m {
            s += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn normalization_and_nodes() {
        let sol = CalogeroSolution::new(10.0, 1.0).unwrap();
        for n in [0, 1, 5, 19, 20, 25] {
            let norm = simpson(
                |x| {
                    if x == 0.0 {
                        0.0
                    } else {
                        sol.eigenfunction_at(n, x).powi(2)
                    }
                },
                6.0,
                60000,
            );
            assert!((norm - 1.0).abs() < 1e-8, "n={n}: {norm}");
            let xs: Vec<f64> = (1..20000).map(|j| j as f64 * 3e-4).collect();
            assert_eq!(sign_changes(&sol.eigenfunction(n, &xs).unwrap()), n);
            assert!(sol.eigenfunction_at(n, 1e-3) > 0.0);
        }
        // Boundary behaviour x^{l+1}.
        let r = sol.eigenfunction_at(3, 2e-6) / sol.eigenfunction_at(3, 1e-6);
        assert!((r - 2f64.powf(sol.l_eff + 1.0)).abs() < 1e-6);
    }

    #[test]
    fn harmonic_reference() {
        let grid = GridSpec::half_line(2000, 0.01).with_offset(-10.0);
        let r = reference_spectrum_on(
            &PotentialSpec::harmonic(1.0),
            &grid,
            3,
            Execution::Sequential,
        )
        .unwrap();
        assert!((r.energies[0] - 0.5).abs() < 1e-4);
        assert!(r.warning.is_none());
        let rich = r.richardson.unwrap();
        assert!((rich[0] - 0.5).abs() < (r.energies[0] - 0.5).abs());
    }

    #[test]
    fn small_domain_warns() {
        let r = reference_spectrum(
            &PotentialSpec::singular_oscillator(10.0, 1.0),
            100,
            0.01,
            3,
            Execution::Sequential,
        )
        .unwrap();
        assert!(r.warning.is_some());
    }

    #[test]
    fn alignment_helpers() {
        let mut v = vec![0.0, -1e-6, -0.5, -0.2, 0.4, 0.7];
        align_first_lobe(&mut v);
        assert!(v[2] > 0.0);
        let z = vec![C64::new(0.0, 1.0), C64::new(0.0, 2.0), C64::new(0.0, 1.0)];
        let a = align_complex_first_lobe(&z);
        assert!((a[1].re - 2.0 / 6f64.sqrt()).abs() < 1e-15 && a[1].im == 0.0);
        let s = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        assert!((overlap(&s, &[C64::new(0.0, 1.0), C64::new(0.0, 1.0)]) - 1.0).abs() < 1e-15);
    }
}
