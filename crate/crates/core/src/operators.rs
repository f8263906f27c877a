//! Coordinate and momentum operators on a uniform grid.
//!
//! All matrices are expressed in the coordinate basis: `x̂` is diagonal with
//! entries `x_n = x_offset + a·n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{commutator, ComplexMatrix, C64};

/// Which label set the momentum eigenvalues `2πℏk/(aN)` run over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumLabels {
    /// `k ∈ {−⌊N/2⌋, …, ⌈N/2⌉ − 1}`: standard DFT ordering, asymmetric for even `N`.
    #[default]
    Centered,
    /// `k ∈ {−(N−1)/2, …, (N−1)/2}`: half-integers for even `N`, so `Σk = 0`
    /// and the momentum matrix has a vanishing diagonal for every `N`.
    Symmetric,
}

impl MomentumLabels {
    pub fn labels(self, n: usize) -> Vec<f64> {
        match self {
            MomentumLabels::Centered => {
                let lo = -((n / 2) as i64);
                (0..n as i64).map(|j| (lo + j) as f64).collect()
            }
            MomentumLabels::Symmetric => {
                let half = (n as f64 - 1.0) / 2.0;
                (0..n).map(|j| j as f64 - half).collect()
            }
        }
    }
}

/// Discretization parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    /// Coordinate step.
    pub a: f64,
    /// Position of grid point 0.
    pub x_offset: f64,
    pub hbar: f64,
    pub mass: f64,
    #[serde(default)]
    pub labels: MomentumLabels,
}

impl GridSpec {
    /// Grid starting at `x = a` (the half-line convention that skips `x = 0`).
    pub fn half_line(n: usize, a: f64) -> Self {
        Self {
            n,
            a,
            x_offset: a,
            hbar: 1.0,
            mass: 1.0,
            labels: MomentumLabels::Centered,
        }
    }

    pub fn with_offset(mut self, x_offset: f64) -> Self {
        self.x_offset = x_offset;
        self
    }

    pub fn with_labels(mut self, labels: MomentumLabels) -> Self {
        self.labels = labels;
        self
    }

    pub fn with_units(mut self, hbar: f64, mass: f64) -> Self {
        self.hbar = hbar;
        self.mass = mass;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {}",
                self.a
            )));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if !self.x_offset.is_finite() {
            return Err(Error::InvalidGrid("offset must be finite".into()));
        }
        Ok(())
    }

    pub fn x(&self, index: usize) -> f64 {
        self.x_offset + self.a * index as f64
    }

    pub fn x_values(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    /// Momentum eigenvalues `2πℏk/(aN)` over the configured label set.
    pub fn momentum_eigenvalues(&self) -> Vec<f64> {
        let scale = 2.0 * PI * self.hbar / (self.a * self.n as f64);
        self.labels
            .labels(self.n)
            .into_iter()
            .map(|k| scale * k)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Mub,
    FiniteDifference,
    ClassicalCommuting,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorPair {
    pub x_op: ComplexMatrix,
    pub p_op: ComplexMatrix,
    pub kind: PairKind,
    /// Present for grid-based builds; classical pairs carry arbitrary diagonals.
    pub grid: Option<GridSpec>,
}

impl OperatorPair {
    pub fn dim(&self) -> usize {
        self.x_op.dim()
    }

    /// Diagonal of `x̂` (the coordinate eigenvalues).
    pub fn x_values(&self) -> Vec<f64> {
        self.x_op.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn hbar(&self) -> f64 {
        self.grid.map_or(1.0, |g| g.hbar)
    }

    pub fn mass(&self) -> f64 {
        self.grid.map_or(1.0, |g| g.mass)
    }

    /// `x_k − x_l`, exact on a uniform grid.
    pub fn x_difference(&self, k: usize, l: usize) -> f64 {
        match self.grid {
            Some(g) => g.a * (k as f64 - l as f64),
            None => self.x_op[(k, k)].re - self.x_op[(l, l)].re,
        }
    }

    /// `‖[x̂, p̂] − iℏI‖_F`; never below `ℏ√N` because commutators are traceless.
    pub fn ccr_defect(&self) -> Result<f64> {
        let c = commutator(&self.x_op, &self.p_op)?;
        let target = ComplexMatrix::identity(self.dim()).scale(C64::new(0.0, self.hbar()));
        Ok((&c - &target).frobenius_norm())
    }
}

/// Unitary overlap matrix `F_nk = exp(i2πnk/N)/√N`, rows and columns both labelled
/// by the centered index set.
pub fn dft_matrix(n: usize) -> ComplexMatrix {
    dft_matrix_with(n, MomentumLabels::Centered)
}

pub fn dft_matrix_with(n: usize, labels: MomentumLabels) -> ComplexMatrix {
    let rows = MomentumLabels::Centered.labels(n);
    let cols = labels.labels(n);
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |r, c| {
        let phase = 2.0 * PI * rows[r] * cols[c] / n as f64;
        C64::from_polar(norm, phase)
    })
}

/// Position/momentum pair whose eigenbases are mutually unbiased.
pub fn build_mub_pair(grid: &GridSpec) -> Result<OperatorPair> {
    grid.validate()?;
    let n = grid.n;
    let f = dft_matrix_with(n, grid.labels);
    let p_diag: Vec<C64> = grid
        .momentum_eigenvalues()
        .into_iter()
        .map(|p| C64::new(p, 0.0))
        .collect();
    let mut fd = f.clone();
    for r in 0..n {
        for c in 0..n {
            fd[(r, c)] *= p_diag[c];
        }
    }
    let mut p_op = fd.matmul(&f.adjoint())?;
    // Symmetrize away rounding so the Hermitian flag is exact.
    for r in 0..n {
        p_op[(r, r)] = C64::new(p_op[(r, r)].re, 0.0);
        for c in (r + 1)..n {
            let v = 0.5 * (p_op[(r, c)] + p_op[(c, r)].conj());
            p_op[(r, c)] = v;
            p_op[(c, r)] = v.conj();
        }
    }
    Ok(OperatorPair {
        x_op: ComplexMatrix::from_real_diagonal(&grid.x_values()),
        p_op,
        kind: PairKind::Mub,
        grid: Some(*grid),
    })
}

/// Central-difference momentum: superdiagonal `−iℏ/(2a)`, subdiagonal `+iℏ/(2a)`.
pub fn build_fd_momentum(grid: &GridSpec) -> Result<OperatorPair> {
    grid.validate()?;
    if grid.n < 3 {
        return Err(Error::InvalidGrid(format!(
            "finite-difference momentum needs N >= 3, got {}",
            grid.n
        )));
    }
    let n = grid.n;
    let h = grid.hbar / (2.0 * grid.a);
    let mut p_op = ComplexMatrix::zeros(n, n);
    for k in 0..n - 1 {
        p_op[(k, k + 1)] = C64::new(0.0, -h);
        p_op[(k + 1, k)] = C64::new(0.0, h);
    }
    Ok(OperatorPair {
        x_op: ComplexMatrix::from_real_diagonal(&grid.x_values()),
        p_op,
        kind: PairKind::FiniteDifference,
        grid: Some(*grid),
    })
}

/// Exactly commuting pair, both diagonal in a shared basis.
///
/// An all-zero `p_values` is accepted here; the Liouvillian witness rejects it.
pub fn build_classical_pair(x_values: &[f64], p_values: &[f64]) -> Result<OperatorPair> {
    if x_values.len() != p_values.len() {
        return Err(Error::DimensionMismatch {
            op: "build_classical_pair",
            left: (x_values.len(), 1),
            right: (p_values.len(), 1),
        });
    }
    if x_values.is_empty() {
        return Err(Error::InvalidArgument(
            "classical pair needs at least one point".into(),
        ));
    }
    if x_values.iter().chain(p_values).all(|v| *v == 0.0) {
        return Err(Error::InvalidArgument(
            "x and p are both identically zero".into(),
        ));
    }
    Ok(OperatorPair {
        x_op: ComplexMatrix::from_real_diagonal(x_values),
        p_op: ComplexMatrix::from_real_diagonal(p_values),
        kind: PairKind::ClassicalCommuting,
        grid: None,
    })
}

/// Tensor phase-space grid: every `(x, p)` combination, `x` outer.
pub fn phase_space_pair(xs: &[f64], ps: &[f64]) -> Result<OperatorPair> {
    let mut xv = Vec::with_capacity(xs.len() * ps.len());
    let mut pv = Vec::with_capacity(xs.len() * ps.len());
    for &x in xs {
        for &p in ps {
            xv.push(x);
            pv.push(p);
        }
    }
    build_classical_pair(&xv, &pv)
}

/// Ramp profile: 0 in the interior, rising quadratically to 1 at both edges over
/// the outer `window_fraction` of grid points.
pub fn absorbing_profile(n: usize, window_fraction: f64) -> Vec<f64> {
    let width = ((window_fraction * n as f64).round() as usize).clamp(1, n.div_ceil(2));
    (0..n)
        .map(|j| {
            let from_edge = j.min(n - 1 - j);
            if from_edge >= width {
                0.0
            } else {
                let t = (width - from_edge) as f64 / width as f64;
                t * t
            }
        })
        .collect()
}

/// `H − iη·diag(w(x_n))` with the quadratic edge ramp of [`absorbing_profile`].
pub fn add_absorbing_part(
    h: &ComplexMatrix,
    eta: f64,
    grid: &GridSpec,
    window_fraction: f64,
) -> Result<ComplexMatrix> {
    let n = h.require_square("add_absorbing_part")?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "absorbing strength must be positive, got {eta}"
        )));
    }
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window fraction must lie in (0, 1), got {window_fraction}"
        )));
    }
    if n != grid.n {
        return Err(Error::DimensionMismatch {
            op: "add_absorbing_part",
            left: (n, n),
            right: (grid.n, grid.n),
        });
    }
    let w = absorbing_profile(n, window_fraction);
    let mut out = h.clone();
    for (k, wk) in w.iter().enumerate() {
        if *wk != 0.0 {
            out[(k, k)] -= C64::new(0.0, eta * wk);
        }
    }
    Ok(out)
}

/// Largest deviation of `|⟨x_n|p_k⟩|²` from `1/N`.
pub fn mub_defect(f: &ComplexMatrix) -> f64 {
    let n = f.dim() as f64;
    f.as_slice()
        .iter()
        .map(|z| (z.norm_sqr() - 1.0 / n).abs())
        .fold(0.0, f64::max)
}

/// Largest deviation from Toeplitz structure.
pub fn toeplitz_defect(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut worst = 0.0_f64;
    for r in 1..n {
        for c in 1..n {
            worst = worst.max((m[(r, c)] - m[(r - 1, c - 1)]).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{eig_general, eig_hermitian};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dft_small_cases() {
        assert_eq!(dft_matrix(1), ComplexMatrix::identity(1));
        // Centered labels {−1, 0}: F = (1/√2)[[e^{iπ}, 1], [1, 1]].
        let f = dft_matrix(2);
        let s = 1.0 / 2f64.sqrt();
        assert!((f[(0, 0)] - c(-s, 0.0)).norm() < 1e-15);
        assert!((f[(0, 1)] - c(s, 0.0)).norm() < 1e-15);
        assert!((f[(1, 0)] - c(s, 0.0)).norm() < 1e-15);
        assert!((f[(1, 1)] - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dft_unitary_and_unbiased() {
        for n in 3..=64 {
            for labels in [MomentumLabels::Centered, MomentumLabels::Symmetric] {
                let f = dft_matrix_with(n, labels);
                let ffh = &f * &f.adjoint();
                let defect = (&ffh - &ComplexMatrix::identity(n)).frobenius_norm();
                assert!(defect <= 1e-12 * (n as f64).sqrt(), "n={n}");
                assert!(mub_defect(&f) <= 1e-12);
            }
        }
    }

    #[test]
    fn label_sets() {
        assert_eq!(
            MomentumLabels::Centered.labels(4),
            vec![-2.0, -1.0, 0.0, 1.0]
        );
        assert_eq!(
            MomentumLabels::Centered.labels(5),
            vec![-2.0, -1.0, 0.0, 1.0, 2.0]
        );
        assert_eq!(
            MomentumLabels::Symmetric.labels(4),
            vec![-1.5, -0.5, 0.5, 1.5]
        );
        assert_eq!(
            MomentumLabels::Symmetric.labels(5),
            MomentumLabels::Centered.labels(5)
        );
    }

    #[test]
    fn mub_pair_two_points() {
        let grid = GridSpec::half_line(2, 1.0);
        let pair = build_mub_pair(&grid).unwrap();
        let e = eig_hermitian(&pair.p_op).unwrap();
        assert!((e.eigenvalues[0].re + PI).abs() < 1e-14);
        assert!(e.eigenvalues[1].re.abs() < 1e-14);
        assert!((pair.p_op.trace().re + PI).abs() < 1e-14);
    }

    #[test]
    fn mub_pair_structure_at_figure_size() {
        let grid = GridSpec::half_line(30, 0.145);
        let max_p = grid
            .momentum_eigenvalues()
            .into_iter()
            .fold(f64::MIN, f64::max);
        assert!((max_p - 2.0 * PI * 14.0 / (0.145 * 30.0)).abs() < 1e-12);
        assert!((max_p - 20.222).abs() < 1e-3);
        let pair = build_mub_pair(&grid).unwrap();
        assert!(pair.p_op.is_hermitian());
        assert!(toeplitz_defect(&pair.p_op) < 1e-12);
        assert!(pair.x_op.is_diagonal(0.0));
        assert_eq!(pair.x_values()[0], 0.145);
    }

    #[test]
    fn symmetric_labels_zero_diagonal() {
        for n in [4, 7, 30] {
            let grid = GridSpec::half_line(n, 0.2).with_labels(MomentumLabels::Symmetric);
            let pair = build_mub_pair(&grid).unwrap();
            let worst = pair
                .p_op
                .diagonal()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "n={n}: {worst}");
        }
    }

    #[test]
    fn ccr_is_unattainable() {
        for n in 2..=40 {
            let grid = GridSpec::half_line(n, 0.3).with_units(0.7, 1.3);
            let mub = build_mub_pair(&grid).unwrap();
            assert!(mub.ccr_defect().unwrap() >= 0.7 * (n as f64).sqrt() - 1e-12);
            if n >= 3 {
                let fd = build_fd_momentum(&grid).unwrap();
                assert!(fd.ccr_defect().unwrap() >= 0.7 * (n as f64).sqrt() - 1e-12);
            }
        }
    }

    #[test]
    fn fd_momentum_three_points() {
        let pair = build_fd_momentum(&GridSpec::half_line(3, 1.0)).unwrap();
        let expected = ComplexMatrix::from_row_major(
            3,
            3,
            vec![
                c(0.0, 0.0),
                c(0.0, -0.5),
                c(0.0, 0.0),
                c(0.0, 0.5),
                c(0.0, 0.0),
                c(0.0, -0.5),
                c(0.0, 0.0),
                c(0.0, 0.5),
                c(0.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(pair.p_op, expected);
        assert!(build_fd_momentum(&GridSpec::half_line(2, 1.0)).is_err());
    }

    #[test]
    fn fd_momentum_gershgorin_bound() {
        let grid = GridSpec::half_line(25, 0.4).with_units(1.5, 1.0);
        let pair = build_fd_momentum(&grid).unwrap();
        let e = eig_hermitian(&pair.p_op).unwrap();
        let bound = grid.hbar / grid.a;
        assert!(e.eigenvalues.iter().all(|z| z.re.abs() <= bound + 1e-12));
    }

    #[test]
    fn fd_momentum_symbol_on_plane_wave() {
        // Central difference multiplies exp(ik₀x) by ℏk₀·sin(k₀a)/(k₀a) away from the edges.
        let grid = GridSpec::half_line(60, 0.1);
        let pair = build_fd_momentum(&grid).unwrap();
        let k0 = 3.0;
        let samples: Vec<C64> = grid
            .x_values()
            .iter()
            .map(|&x| C64::from_polar(1.0, k0 * x))
            .collect();
        let out = pair.p_op.mat_vec(&samples).unwrap();
        let symbol = grid.hbar * k0 * (k0 * grid.a).sin() / (k0 * grid.a);
        for j in 1..59 {
            assert!((out[j] - samples[j] * symbol).norm() < 1e-12);
        }
    }

    #[test]
    fn classical_pairs() {
        let zero_p = build_classical_pair(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert!(zero_p.p_op.is_zero());
        let grid = phase_space_pair(&[0.0, 1.0], &[-1.0, 1.0]).unwrap();
        assert_eq!(grid.dim(), 4);
        assert_eq!(grid.x_values(), vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(
            commutator(&grid.x_op, &grid.p_op).unwrap().frobenius_norm(),
            0.0
        );
        assert!(build_classical_pair(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn absorbing_profile_shape() {
        let w = absorbing_profile(30, 0.2);
        assert_eq!(w[0], 1.0);
        assert_eq!(w[29], 1.0);
        assert!(w[6..24].iter().all(|v| *v == 0.0));
        assert!(w[1] < w[0] && w[1] > 0.0);
    }

    #[test]
    fn absorbing_part_is_dissipative() {
        let grid = GridSpec::half_line(30, 0.145);
        let pair = build_mub_pair(&grid).unwrap();
        let h = (&pair.p_op * &pair.p_op).scale_real(0.5);
        let hc = add_absorbing_part(&h, 1.0, &grid, 0.2).unwrap();
        assert!(!hc.is_hermitian());
        let e = eig_general(&hc).unwrap();
        let max_im = e.eigenvalues.iter().map(|z| z.im).fold(f64::MIN, f64::max);
        assert!(max_im <= 1e-10, "{max_im}");
        let tiny = add_absorbing_part(&h, 1e-300, &grid, 0.2).unwrap();
        assert!(tiny.max_abs_diff(&h) <= 1e-300);
        assert!(add_absorbing_part(&h, 0.0, &grid, 0.2).is_err());
    }
}
