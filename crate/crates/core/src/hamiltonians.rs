//! Hamiltonian families built from an operator pair and a potential.
//!
//! * `Mub`: `p̂²/(2m) + U(x̂)` with the mutually unbiased momentum.
//! * `MubStar` / `FdStar`: the general solution of `i m [H, x̂] = ℏ p̂` for a
//!   non-degenerate diagonal `x̂`, with diagonal `U(x_k) + C` and off-diagonal
//!   `iℏ⟨x_k|p̂|x_l⟩ / (m (x_k − x_l))`. With the central-difference momentum this is
//!   the three-point Laplacian stencil.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, SymTridiagonal, C64};
use crate::operators::{GridSpec, OperatorPair, PairKind};

/// Shape of `U(x)`; the additive constant lives in [`PotentialSpec::c`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PotentialShape {
    /// `ω²x²/8 + g/(4x²)` on the half-line.
    SingularOscillator {
        omega: f64,
        g: f64,
    },
    /// `ω²x²/2`
    Harmonic {
        omega: f64,
    },
    /// `slope · x`
    Linear {
        slope: f64,
    },
    /// `Σ c_j x^j`
    Polynomial {
        coeffs: Vec<f64>,
    },
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub shape: PotentialShape,
    /// Energy offset placed on the diagonal of the `*Star` Hamiltonians.
    #[serde(default)]
    pub c: f64,
}

impl PotentialSpec {
    pub fn new(shape: PotentialShape) -> Self {
        Self { shape, c: 0.0 }
    }

    pub fn singular_oscillator(omega: f64, g: f64) -> Self {
        Self::new(PotentialShape::SingularOscillator { omega, g })
    }

    pub fn harmonic(omega: f64) -> Self {
        Self::new(PotentialShape::Harmonic { omega })
    }

    pub fn free() -> Self {
        Self::new(PotentialShape::Free)
    }

    pub fn linear(slope: f64) -> Self {
        Self::new(PotentialShape::Linear { slope })
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.shape {
            PotentialShape::SingularOscillator { .. } => "singular_oscillator",
            PotentialShape::Harmonic { .. } => "harmonic",
            PotentialShape::Linear { .. } => "linear",
            PotentialShape::Polynomial { .. } => "polynomial",
            PotentialShape::Free => "free",
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.shape, PotentialShape::Free)
    }
}

/// `(U(x), U′(x))`, excluding the constant `C`.
pub fn eval_potential(spec: &PotentialSpec, x: f64) -> Result<(f64, f64)> {
    let (u, du) = match &spec.shape {
        PotentialShape::SingularOscillator { omega, g } => {
            if x == 0.0 {
                return Err(domain(spec, x));
            }
            let w2 = omega * omega;
            (
                w2 * x * x / 8.0 + g / (4.0 * x * x),
                w2 * x / 4.0 - g / (2.0 * x * x * x),
            )
        }
        PotentialShape::Harmonic { omega } => (0.5 * omega * omega * x * x, omega * omega * x),
        PotentialShape::Linear { slope } => (slope * x, *slope),
        PotentialShape::Polynomial { coeffs } => {
            let u = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let du = coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (j, c)| acc * x + j as f64 * c);
            (u, du)
        }
        PotentialShape::Free => (0.0, 0.0),
    };
    if u.is_finite() && du.is_finite() {
        Ok((u, du))
    } else {
        Err(domain(spec, x))
    }
}

fn domain(spec: &PotentialSpec, x: f64) -> Error {
    Error::PotentialDomain {
        potential: spec.name().to_string(),
        x,
    }
}

/// `U` and `U′` on every coordinate value.
pub fn potential_on_grid(spec: &PotentialSpec, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    xs.iter()
        .map(|&x| eval_potential(spec, x))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().unzip())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    Mub,
    MubStar,
    FdStar,
    Custom,
}

impl HamiltonianKind {
    pub fn label(self) -> &'static str {
        match self {
            HamiltonianKind::Mub => "mub",
            HamiltonianKind::MubStar => "mub_star",
            HamiltonianKind::FdStar => "fd_star",
            HamiltonianKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianBuild {
    pub matrix: ComplexMatrix,
    pub kind: HamiltonianKind,
    pub pair: OperatorPair,
    pub potential: PotentialSpec,
    /// Structural claim; the residual check lives in `ehrenfest`.
    pub satisfies_first_ehrenfest: bool,
    /// `U(x_n)` as placed on the diagonal (without `C`), kept so large values near a
    /// singularity stay visible.
    pub potential_values: Vec<f64>,
}

impl HamiltonianBuild {
    pub fn max_abs_potential(&self) -> f64 {
        self.potential_values
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `p̂²/(2m) + U(x̂)` for a mutually unbiased pair.
pub fn build_h_mub(pair: &OperatorPair, potential: &PotentialSpec) -> Result<HamiltonianBuild> {
    if pair.kind != PairKind::Mub {
        return Err(Error::InvalidArgument(format!(
            "build_h_mub needs a mutually unbiased pair, got {:?}",
            pair.kind
        )));
    }
    let n = pair.dim();
    let (u, _) = potential_on_grid(potential, &pair.x_values())?;
    let mut h = pair.p_op.matmul(&pair.p_op)?.scale_real(0.5 / pair.mass());
    for k in 0..n {
        h[(k, k)] = C64::new(h[(k, k)].re + u[k], 0.0);
        for l in (k + 1)..n {
            let v = 0.5 * (h[(k, l)] + h[(l, k)].conj());
            h[(k, l)] = v;
            h[(l, k)] = v.conj();
        }
    }
    Ok(HamiltonianBuild {
        matrix: h,
        kind: HamiltonianKind::Mub,
        pair: pair.clone(),
        potential: potential.clone(),
        satisfies_first_ehrenfest: false,
        potential_values: u,
    })
}

/// Minimum spacing of the coordinate spectrum, with the degeneracy tolerance it is
/// compared against (`1e-10 · spread`).
pub fn coordinate_gap(xs: &[f64]) -> (f64, f64) {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let spread = sorted.last().copied().unwrap_or(0.0) - sorted.first().copied().unwrap_or(0.0);
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    (gap, 1e-10 * spread)
}

/// General Hamiltonian obeying `i m [H, x̂] = ℏ p̂` off the diagonal.
///
/// The diagonal of `[H, x̂]` always vanishes, so the relation holds exactly only
/// when `p̂` has a zero diagonal in the coordinate basis.
pub fn build_h_star(pair: &OperatorPair, potential: &PotentialSpec) -> Result<HamiltonianBuild> {
    let n = pair.dim();
    let xs = pair.x_values();
    if !pair.x_op.is_diagonal(0.0) {
        return Err(Error::InvalidArgument(
            "x operator must be diagonal in the working basis".into(),
        ));
    }
    let (gap, tolerance) = coordinate_gap(&xs);
    if n > 1 && gap <= tolerance {
        return Err(Error::DegenerateSpectrum { gap, tolerance });
    }
    let (u, _) = potential_on_grid(potential, &xs)?;
    let hbar = pair.hbar();
    let mass = pair.mass();
    let ih = C64::new(0.0, hbar);
    let mut h = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        h[(k, k)] = C64::new(u[k] + potential.c, 0.0);
        for l in 0..n {
            if l != k {
                let p = pair.p_op[(k, l)];
                if p != C64::new(0.0, 0.0) {
                    h[(k, l)] = ih * p / (mass * pair.x_difference(k, l));
                }
            }
        }
    }
    let kind = match pair.kind {
        PairKind::Mub => HamiltonianKind::MubStar,
        PairKind::FiniteDifference => HamiltonianKind::FdStar,
        PairKind::ClassicalCommuting => HamiltonianKind::Custom,
    };
    Ok(HamiltonianBuild {
        matrix: h,
        kind,
        pair: pair.clone(),
        potential: potential.clone(),
        satisfies_first_ehrenfest: true,
        potential_values: u,
    })
}

/// Tridiagonal form of the finite-difference `H*`: off-diagonal `−ℏ²/(2ma²)`,
/// diagonal `U(x_k) + C`.
pub fn fd_star_tridiagonal(grid: &GridSpec, potential: &PotentialSpec) -> Result<SymTridiagonal> {
    grid.validate()?;
    if grid.n < 3 {
        return Err(Error::InvalidGrid(format!(
            "finite-difference Hamiltonian needs N >= 3, got {}",
            grid.n
        )));
    }
    let (u, _) = potential_on_grid(potential, &grid.x_values())?;
    // Same operation order as build_h_star applied to the central-difference momentum.
    let off = -(grid.hbar * (grid.hbar / (2.0 * grid.a))) / (grid.mass * grid.a);
    SymTridiagonal::new(
        u.iter().map(|v| v + potential.c).collect(),
        vec![off; grid.n - 1],
    )
}

pub fn build_h_star_fd(grid: &GridSpec, potential: &PotentialSpec) -> Result<HamiltonianBuild> {
    let t = fd_star_tridiagonal(grid, potential)?;
    let n = grid.n;
    let mut h = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        h[(k, k)] = C64::new(t.diag[k], 0.0);
        if k + 1 < n {
            h[(k, k + 1)] = C64::new(t.off[k], 0.0);
            h[(k + 1, k)] = C64::new(t.off[k], 0.0);
        }
    }
    let pair = crate::operators::build_fd_momentum(grid)?;
    let potential_values = t.diag.iter().map(|d| d - potential.c).collect();
    Ok(HamiltonianBuild {
        matrix: h,
        kind: HamiltonianKind::FdStar,
        pair,
        potential: potential.clone(),
        satisfies_first_ehrenfest: true,
        potential_values,
    })
}

/// Diagonal of the kinetic term `p̂²/(2m)` in the coordinate basis, averaged over
/// grid points (it is constant for both built-in momenta away from the edges).
///
/// Used as the `C` that makes an `H*` Hamiltonian share the kinetic diagonal of
/// its `p̂²/(2m) + U` counterpart: `ℏ²/(ma²)` for the three-point stencil and
/// `Σ_k p_k² /(2mN)` for the mutually unbiased momentum.
pub fn kinetic_diagonal(pair: &OperatorPair) -> f64 {
    match (pair.kind, pair.grid) {
        (PairKind::FiniteDifference, Some(g)) => g.hbar * g.hbar / (g.mass * g.a * g.a),
        (PairKind::Mub, Some(g)) => {
            let p = g.momentum_eigenvalues();
            p.iter().map(|v| v * v).sum::<f64>() / (2.0 * g.mass * g.n as f64)
        }
        _ => {
            let p2 = &pair.p_op * &pair.p_op;
            p2.trace().re / (2.0 * pair.mass() * pair.dim() as f64)
        }
    }
}

/// How the diagonal constant `C` of the `*Star` Hamiltonians is chosen.
///
/// Serialized as a number or as the string `"kinetic"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CSetting {
    Fixed(f64),
    Rule(CRule),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CRule {
    /// [`kinetic_diagonal`] of the pair in use.
    Kinetic,
}

impl CSetting {
    pub const KINETIC: CSetting = CSetting::Rule(CRule::Kinetic);

    pub fn resolve(self, pair: &OperatorPair) -> f64 {
        match self {
            CSetting::Fixed(c) => c,
            CSetting::Rule(CRule::Kinetic) => kinetic_diagonal(pair),
        }
    }
}

impl Default for CSetting {
    fn default() -> Self {
        CSetting::Fixed(0.0)
    }
}

impl std::fmt::Display for CSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CSetting::Fixed(c) => write!(f, "{c}"),
            CSetting::Rule(CRule::Kinetic) => f.write_str("kinetic"),
        }
    }
}

impl std::str::FromStr for CSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("kinetic") {
            return Ok(CSetting::KINETIC);
        }
        s.parse::<f64>()
            .ok()
            .filter(|c| c.is_finite())
            .map(CSetting::Fixed)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "C must be a finite number or \"kinetic\", got {s:?}"
                ))
            })
    }
}

/// One of the three families on a given grid. `C` applies to the `*Star` kinds only;
/// `p̂²/(2m) + U` carries no free constant.
pub fn build_family(
    kind: HamiltonianKind,
    grid: &GridSpec,
    potential: &PotentialSpec,
    c: CSetting,
) -> Result<HamiltonianBuild> {
    match kind {
        HamiltonianKind::Mub => build_h_mub(&crate::operators::build_mub_pair(grid)?, potential),
        HamiltonianKind::MubStar => {
            let pair = crate::operators::build_mub_pair(grid)?;
            let spec = potential.clone().with_c(c.resolve(&pair));
            build_h_star(&pair, &spec)
        }
        HamiltonianKind::FdStar => {
            let pair = crate::operators::build_fd_momentum(grid)?;
            build_h_star_fd(grid, &potential.clone().with_c(c.resolve(&pair)))
        }
        HamiltonianKind::Custom => Err(Error::InvalidArgument(
            "custom Hamiltonians have no family builder".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ehrenfest::first_residual;
    use crate::exec::Execution;
    use crate::matkit::eig_hermitian;
    use crate::operators::{build_fd_momentum, build_mub_pair, MomentumLabels};
    use std::f64::consts::PI;

    #[test]
    fn singular_oscillator_values() {
        let spec = PotentialSpec::singular_oscillator(10.0, 1.0);
        let (u, du) = eval_potential(&spec, 1.0).unwrap();
        assert_eq!(u, 12.75);
        assert_eq!(du, 24.5);
        assert!(matches!(
            eval_potential(&spec, 0.0),
            Err(Error::PotentialDomain { .. })
        ));
        assert_eq!(
            eval_potential(&PotentialSpec::free(), 3.7).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn polynomial_derivative() {
        let spec = PotentialSpec::new(PotentialShape::Polynomial {
            coeffs: vec![1.0, -2.0, 0.5, 3.0],
        });
        let (u, du) = eval_potential(&spec, 2.0).unwrap();
        assert_eq!(u, 1.0 - 4.0 + 2.0 + 24.0);
        assert_eq!(du, -2.0 + 2.0 + 36.0);
    }

    #[test]
    fn free_mub_spectrum_is_kinetic() {
        let grid = GridSpec::half_line(7, 0.4);
        let pair = build_mub_pair(&grid).unwrap();
        let h = build_h_mub(&pair, &PotentialSpec::free()).unwrap();
        let mut expected: Vec<f64> = grid
            .momentum_eigenvalues()
            .iter()
            .map(|p| p * p / 2.0)
            .collect();
        expected.sort_by(f64::total_cmp);
        let got = eig_hermitian(&h.matrix).unwrap().real_eigenvalues();
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn free_mub_two_points() {
        let pair = build_mub_pair(&GridSpec::half_line(2, 1.0)).unwrap();
        let h = build_h_mub(&pair, &PotentialSpec::free()).unwrap();
        let e = eig_hermitian(&h.matrix).unwrap().real_eigenvalues();
        assert!(e[0].abs() < 1e-14);
        assert!((e[1] - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn h_mub_is_hermitian_at_figure_parameters() {
        let pair = build_mub_pair(&GridSpec::half_line(30, 0.145)).unwrap();
        let h = build_h_mub(&pair, &PotentialSpec::singular_oscillator(10.0, 1.0)).unwrap();
        assert!(h.matrix.hermiticity_defect() <= 1e-12);
        assert!(!h.satisfies_first_ehrenfest);
    }

    #[test]
    fn h_mub_rejects_other_pairs() {
        let pair = build_fd_momentum(&GridSpec::half_line(5, 0.1)).unwrap();
        assert!(build_h_mub(&pair, &PotentialSpec::free()).is_err());
    }

    #[test]
    fn fd_star_three_points() {
        let h = build_h_star_fd(&GridSpec::half_line(3, 1.0), &PotentialSpec::free()).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, -0.5, 0.0],
            &[-0.5, 0.0, -0.5],
            &[0.0, -0.5, 0.0],
        ]);
        assert_eq!(h.matrix, expected);
    }

    #[test]
    fn h_star_with_fd_momentum_is_the_stencil() {
        let grid = GridSpec::half_line(12, 0.37).with_units(1.3, 0.8);
        let pot = PotentialSpec::singular_oscillator(3.0, 0.5).with_c(0.25);
        let via_star = build_h_star(&build_fd_momentum(&grid).unwrap(), &pot).unwrap();
        let direct = build_h_star_fd(&grid, &pot).unwrap();
        assert_eq!(via_star.kind, HamiltonianKind::FdStar);
        assert!(via_star.matrix.max_abs_diff(&direct.matrix) <= 1e-14);
    }

    #[test]
    fn h_star_with_zero_momentum_is_diagonal_potential() {
        let pair = build_classical_like(&[0.5, 1.0, 1.5], &[0.0, 0.0, 0.0]);
        let pot = PotentialSpec::harmonic(1.0).with_c(2.0);
        let h = build_h_star(&pair, &pot).unwrap();
        assert!(h.matrix.is_diagonal(0.0));
        assert_eq!(h.matrix[(1, 1)].re, 0.5 + 2.0);
    }

    fn build_classical_like(xs: &[f64], ps: &[f64]) -> OperatorPair {
        OperatorPair {
            x_op: ComplexMatrix::from_real_diagonal(xs),
            p_op: ComplexMatrix::from_real_diagonal(ps),
            kind: PairKind::ClassicalCommuting,
            grid: None,
        }
    }

    #[test]
    fn h_star_rejects_degenerate_coordinates() {
        let pair = build_classical_like(&[1.0, 1.0, 2.0], &[0.0, 0.0, 0.0]);
        assert!(matches!(
            build_h_star(&pair, &PotentialSpec::free()),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn h_star_mub_solves_first_relation_for_symmetric_labels() {
        let grid = GridSpec::half_line(30, 0.145).with_labels(MomentumLabels::Symmetric);
        let pair = build_mub_pair(&grid).unwrap();
        let h = build_h_star(&pair, &PotentialSpec::singular_oscillator(10.0, 1.0)).unwrap();
        assert!(h.matrix.is_hermitian());
        let (r1, scale) = first_residual(&h.matrix, &pair).unwrap();
        assert!(r1 <= 1e-10 * scale, "{r1} vs {scale}");
    }

    #[test]
    fn h_star_residual_equals_momentum_diagonal() {
        // Centered labels at even N leave ⟨x_k|p|x_k⟩ = −πℏ/(aN) on the diagonal,
        // which no commutator with x̂ can produce.
        let grid = GridSpec::half_line(30, 0.145);
        let pair = build_mub_pair(&grid).unwrap();
        let h = build_h_star(&pair, &PotentialSpec::singular_oscillator(10.0, 1.0)).unwrap();
        let (r1, _) = first_residual(&h.matrix, &pair).unwrap();
        let diag = PI / (0.145 * 30.0);
        assert!((r1 - diag * 30f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn c_shift_moves_spectrum_rigidly() {
        let grid = GridSpec::half_line(10, 0.2).with_labels(MomentumLabels::Symmetric);
        let pair = build_mub_pair(&grid).unwrap();
        let pot = PotentialSpec::singular_oscillator(10.0, 1.0);
        let e0 = eig_hermitian(&build_h_star(&pair, &pot).unwrap().matrix).unwrap();
        let e1 = eig_hermitian(
            &build_h_star(&pair, &pot.clone().with_c(3.5))
                .unwrap()
                .matrix,
        )
        .unwrap();
        for k in 0..10 {
            assert!((e1.eigenvalues[k].re - e0.eigenvalues[k].re - 3.5).abs() < 1e-11);
            let overlap: C64 = e0
                .eigenvectors
                .column(k)
                .iter()
                .zip(e1.eigenvectors.column(k))
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn h_mub_and_h_star_differ() {
        let grid = GridSpec::half_line(30, 0.145).with_labels(MomentumLabels::Symmetric);
        let pair = build_mub_pair(&grid).unwrap();
        let pot = PotentialSpec::singular_oscillator(10.0, 1.0);
        let a = build_h_mub(&pair, &pot).unwrap();
        let b = build_h_star(&pair, &pot).unwrap();
        let d = &a.matrix - &b.matrix;
        assert!(d.is_hermitian());
        assert!(d.frobenius_norm() > 1.0);
    }

    #[test]
    fn harmonic_ground_state_converges() {
        let grid = GridSpec::half_line(2000, 0.01).with_offset(-10.0);
        let pair = build_fd_momentum(&GridSpec::half_line(3, 0.01)).unwrap();
        let _ = pair;
        let fd_pair_c = grid.hbar * grid.hbar / (grid.mass * grid.a * grid.a);
        let pot = PotentialSpec::harmonic(1.0).with_c(fd_pair_c);
        let t = fd_star_tridiagonal(&grid, &pot).unwrap();
        let (vals, _) = t.lowest(1, Execution::Sequential);
        assert!((vals[0] - 0.5).abs() < 1e-4, "{}", vals[0]);
    }

    #[test]
    fn c_setting_parsing() {
        assert_eq!("kinetic".parse::<CSetting>().unwrap(), CSetting::KINETIC);
        assert_eq!("2.5".parse::<CSetting>().unwrap(), CSetting::Fixed(2.5));
        assert!("nan".parse::<CSetting>().is_err());
        let json = serde_json::to_string(&CSetting::KINETIC).unwrap();
        assert_eq!(json, "\"kinetic\"");
        assert_eq!(
            serde_json::from_str::<CSetting>("0.5").unwrap(),
            CSetting::Fixed(0.5)
        );
    }

    #[test]
    fn family_builder_matches_direct_builds() {
        let grid = GridSpec::half_line(12, 0.2).with_labels(MomentumLabels::Symmetric);
        let pot = PotentialSpec::singular_oscillator(10.0, 1.0);
        let fd = build_family(HamiltonianKind::FdStar, &grid, &pot, CSetting::KINETIC).unwrap();
        let direct = build_h_star_fd(&grid, &pot.clone().with_c(25.0)).unwrap();
        assert!(fd.matrix.max_abs_diff(&direct.matrix) < 1e-12);
        let mub = build_family(HamiltonianKind::Mub, &grid, &pot, CSetting::Fixed(3.0)).unwrap();
        assert_eq!(mub.kind, HamiltonianKind::Mub);
        assert!(build_family(HamiltonianKind::Custom, &grid, &pot, CSetting::KINETIC).is_err());
    }

    #[test]
    fn kinetic_diagonals() {
        let grid = GridSpec::half_line(9, 0.3);
        let fd = build_fd_momentum(&grid).unwrap();
        assert!((kinetic_diagonal(&fd) - 1.0 / 0.09).abs() < 1e-12);
        let mub = build_mub_pair(&grid).unwrap();
        let p2 = &mub.p_op * &mub.p_op;
        for k in 0..9 {
            assert!((p2[(k, k)].re / 2.0 - kinetic_diagonal(&mub)).abs() < 1e-10);
        }
    }
}
