//! Data behind the spectrum and eigenvector comparisons and the residual report.
//!
//! Three 30-dimensional Hamiltonians for the singular oscillator are compared with
//! the closed form: `fd_star` at its hand-picked step, and `mub_star` / `mub` at
//! the step that minimizes their largest eigenvalue.

use serde::{Deserialize, Serialize};

use crate::calogero::{align_complex_first_lobe, discrete_samples, overlap, CalogeroSolution};
use crate::ehrenfest::{
    ehrenfest_residuals, force_operators, function_commutator_defect, trace_obstruction,
    FunctionDefect, ResidualReport,
};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::hamiltonians::{
    build_family, CSetting, HamiltonianBuild, HamiltonianKind, PotentialSpec,
};
use crate::matkit::{eig_hermitian, ScalarFn, C64};
use crate::operators::{GridSpec, MomentumLabels, OperatorPair};
use crate::stepopt::fit_quality;

pub const FAMILIES: [HamiltonianKind; 3] = [
    HamiltonianKind::FdStar,
    HamiltonianKind::MubStar,
    HamiltonianKind::Mub,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Steps {
    pub fd_star: f64,
    pub mub_star: f64,
    pub mub: f64,
}

impl Default for Steps {
    fn default() -> Self {
        Self {
            fd_star: 0.09,
            mub_star: 0.145,
            mub: 0.145,
        }
    }
}

impl Steps {
    pub fn get(&self, kind: HamiltonianKind) -> f64 {
        match kind {
            HamiltonianKind::FdStar => self.fd_star,
            HamiltonianKind::MubStar => self.mub_star,
            _ => self.mub,
        }
    }

    pub fn set(&mut self, kind: HamiltonianKind, a: f64) {
        match kind {
            HamiltonianKind::FdStar => self.fd_star = a,
            HamiltonianKind::MubStar => self.mub_star = a,
            _ => self.mub = a,
        }
    }
}

/// Physical and numerical parameters of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSetup {
    pub n: usize,
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    pub g: f64,
    pub c: CSetting,
    pub labels: MomentumLabels,
    pub steps: Steps,
}

impl Default for FigureSetup {
    fn default() -> Self {
        Self {
            n: 30,
            hbar: 1.0,
            mass: 1.0,
            omega: 10.0,
            g: 1.0,
            c: CSetting::KINETIC,
            labels: MomentumLabels::Symmetric,
            steps: Steps::default(),
        }
    }
}

impl FigureSetup {
    pub fn validate(&self) -> Result<()> {
        if self.hbar != 1.0 || self.mass != 1.0 {
            return Err(Error::InvalidArgument(
                "the closed-form reference assumes hbar = m = 1".into(),
            ));
        }
        CalogeroSolution::new(self.omega, self.g)?;
        for kind in FAMILIES {
            self.grid(kind).validate()?;
        }
        if self.n < 3 {
            return Err(Error::InvalidGrid(format!(
                "comparison needs N >= 3, got {}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn solution(&self) -> Result<CalogeroSolution> {
        CalogeroSolution::new(self.omega, self.g)
    }

    pub fn potential(&self) -> PotentialSpec {
        PotentialSpec::singular_oscillator(self.omega, self.g)
    }

    pub fn grid(&self, kind: HamiltonianKind) -> GridSpec {
        GridSpec::half_line(self.n, self.steps.get(kind))
            .with_units(self.hbar, self.mass)
            .with_labels(self.labels)
    }

    pub fn build(&self, kind: HamiltonianKind) -> Result<HamiltonianBuild> {
        build_family(kind, &self.grid(kind), &self.potential(), self.c)
    }

    /// The resolved `C` for a family (always 0 for `mub`).
    pub fn c_value(&self, build: &HamiltonianBuild) -> f64 {
        match build.kind {
            HamiltonianKind::Mub => 0.0,
            _ => self.c.resolve(&build.pair),
        }
    }
}

/// One diagonalized family.
#[derive(Clone, Debug)]
pub struct Solved {
    pub build: HamiltonianBuild,
    pub grid: GridSpec,
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

pub fn solve_families(setup: &FigureSetup, exec: Execution) -> Result<Vec<Solved>> {
    setup.validate()?;
    map_slice(exec, &FAMILIES, |&kind| {
        let build = setup.build(kind)?;
        let e = eig_hermitian(&build.matrix)?;
        Ok(Solved {
            grid: setup.grid(kind),
            energies: e.real_eigenvalues(),
            vectors: (0..e.dim()).map(|k| e.eigenvectors.column(k)).collect(),
            build,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub state_index: usize,
    pub e_exact: f64,
    pub e_fd_star: f64,
    pub e_mub_star: f64,
    pub e_mub: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub kind: HamiltonianKind,
    pub a: f64,
    pub c: f64,
    /// Mean absolute error over the lowest `fit_states` levels.
    pub fit: f64,
    pub ground_state_error: f64,
    pub max_abs_potential: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Data {
    pub rows: Vec<Fig1Row>,
    pub fit_states: usize,
    pub families: Vec<FamilySummary>,
}

impl Fig1Data {
    pub fn family(&self, kind: HamiltonianKind) -> &FamilySummary {
        self.families
            .iter()
            .find(|f| f.kind == kind)
            .expect("all families are summarized")
    }
}

pub fn fig1_data(setup: &FigureSetup, fit_states: usize, exec: Execution) -> Result<Fig1Data> {
    let solved = solve_families(setup, exec)?;
    let exact = setup.solution()?.energies(setup.n);
    let rows = (0..setup.n)
        .map(|k| Fig1Row {
            state_index: k,
            e_exact: exact[k],
            e_fd_star: solved[0].energies[k],
            e_mub_star: solved[1].energies[k],
            e_mub: solved[2].energies[k],
        })
        .collect();
    let families = solved
        .iter()
        .map(|s| {
            Ok(FamilySummary {
                kind: s.build.kind,
                a: s.grid.a,
                c: setup.c_value(&s.build),
                fit: fit_quality(&s.energies, &exact, fit_states)?,
                ground_state_error: (s.energies[0] - exact[0]).abs(),
                max_abs_potential: s.build.max_abs_potential(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig1Data {
        rows,
        fit_states,
        families,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub kind: HamiltonianKind,
    pub index: usize,
    /// `|Σ √a ψ(x_k) conj(v_k)|`, both sides unit-normalized on the grid.
    pub overlap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub x: f64,
    /// Closed-form `ψ(x)` (continuum normalization).
    pub psi_exact: f64,
    pub v_fd_star: Option<f64>,
    pub v_mub_star: Option<f64>,
    pub v_mub: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Data {
    pub index: usize,
    pub rows: Vec<Fig2Row>,
    /// Overlaps for every requested index convention and family.
    pub overlaps: Vec<Overlap>,
    /// Largest imaginary part dropped after phase alignment, per family.
    pub dropped_imaginary: Vec<(HamiltonianKind, f64)>,
    /// `Σ ψ(x_k)² a` on each family's grid (truncation of the exact state).
    pub exact_grid_norms: Vec<(HamiltonianKind, f64)>,
}

impl Fig2Data {
    pub fn overlap(&self, kind: HamiltonianKind, index: usize) -> Option<f64> {
        self.overlaps
            .iter()
            .find(|o| o.kind == kind && o.index == index)
            .map(|o| o.overlap)
    }
}

/// Amplitudes `v_k/√a` of eigenvector `index`, real part kept.
///
/// The phase makes the overlap with the sampled exact state real and positive. A
/// first-lobe rule is not usable here: near the sampling limit the modulus envelope
/// peaks at different grid points for different vectors. Falls back to the
/// first-lobe rule when the overlap vanishes.
fn amplitudes(s: &Solved, index: usize, exact: &[f64]) -> (Vec<f64>, f64) {
    let v = &s.vectors[index];
    let dot: C64 = exact.iter().zip(v).map(|(e, z)| z * e).sum();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = if dot.norm() > 1e-12 * norm {
        let phase = dot.conj() / dot.norm();
        v.iter().map(|z| z * phase / norm).collect()
    } else {
        align_complex_first_lobe(v)
    };
    let im = v.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    let scale = s.grid.a.sqrt();
    (v.iter().map(|z| z.re / scale).collect(), im)
}

/// Eigenvector comparison at `index`, with overlaps for every entry of `conventions`.
pub fn fig2_data(
    setup: &FigureSetup,
    index: usize,
    conventions: &[usize],
    exec: Execution,
) -> Result<Fig2Data> {
    if index >= setup.n || conventions.iter().any(|&k| k >= setup.n) {
        return Err(Error::InvalidArgument(format!(
            "eigenvector index must be below N = {}",
            setup.n
        )));
    }
    let solved = solve_families(setup, exec)?;
    let sol = setup.solution()?;

    let mut overlaps = Vec::new();
    for &k in conventions {
        for s in &solved {
            let samples = discrete_samples(&sol, k, &s.grid)?;
            overlaps.push(Overlap {
                kind: s.build.kind,
                index: k,
                overlap: overlap(&samples, &s.vectors[k]),
            });
        }
    }

    // Union of the grids; points closer than 1e-12 are merged.
    let mut points: Vec<(f64, usize, f64)> = Vec::new();
    let mut dropped_imaginary = Vec::new();
    let mut exact_grid_norms = Vec::new();
    for (f, s) in solved.iter().enumerate() {
        let (amp, im) = amplitudes(s, index, &discrete_samples(&sol, index, &s.grid)?);
        dropped_imaginary.push((s.build.kind, im));
        let xs = s.grid.x_values();
        let norm = sol
            .eigenfunction(index, &xs)?
            .iter()
            .map(|p| p * p)
            .sum::<f64>()
            * s.grid.a;
        exact_grid_norms.push((s.build.kind, norm));
        points.extend(xs.into_iter().zip(amp).map(|(x, v)| (x, f, v)));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rows: Vec<Fig2Row> = Vec::new();
    for (x, f, v) in points {
        let merge = rows.last().is_some_and(|r| (r.x - x).abs() <= 1e-12);
        if !merge {
            rows.push(Fig2Row {
                x,
                psi_exact: sol.eigenfunction_at(index, x),
                v_fd_star: None,
                v_mub_star: None,
                v_mub: None,
            });
        }
        let row = rows.last_mut().expect("row just pushed");
        match f {
            0 => row.v_fd_star = Some(v),
            1 => row.v_mub_star = Some(v),
            _ => row.v_mub = Some(v),
        }
    }
    Ok(Fig2Data {
        index,
        rows,
        overlaps,
        dropped_imaginary,
        exact_grid_norms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCheck {
    pub kind: HamiltonianKind,
    pub a: f64,
    pub c: f64,
    pub residuals: ResidualReport,
    /// `ℏ |trace U′(x)| / √N`, the floor for `r2`.
    pub r2_floor: f64,
    pub hermiticity_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    /// `mub` or `fd`.
    pub pair: String,
    pub a: f64,
    /// `‖−U′(x) − i[U(x), p]/ℏ‖_F`
    pub force_gap: f64,
    /// `‖[x, −ip/ℏ] − I‖_F` with `f = identity`, and the `exp(ikx)` family.
    pub function_defect: FunctionDefect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckData {
    pub families: Vec<FamilyCheck>,
    pub pairs: Vec<PairCheck>,
}

impl CheckData {
    pub fn family(&self, kind: HamiltonianKind) -> &FamilyCheck {
        self.families
            .iter()
            .find(|f| f.kind == kind)
            .expect("all families are checked")
    }
}

fn pair_check(
    name: &str,
    pair: &OperatorPair,
    potential: &PotentialSpec,
    a: f64,
) -> Result<PairCheck> {
    let b = pair.p_op.scale(C64::new(0.0, -1.0 / pair.hbar()));
    Ok(PairCheck {
        pair: name.to_string(),
        a,
        force_gap: force_operators(pair, potential)?.gap,
        function_defect: function_commutator_defect(&pair.x_op, &b, &ScalarFn::Identity)?,
    })
}

pub fn check_data(setup: &FigureSetup, exec: Execution) -> Result<CheckData> {
    setup.validate()?;
    let potential = setup.potential();
    let families = map_slice(exec, &FAMILIES, |&kind| {
        let build = setup.build(kind)?;
        Ok(FamilyCheck {
            kind,
            a: setup.steps.get(kind),
            c: setup.c_value(&build),
            residuals: ehrenfest_residuals(&build.matrix, &build.pair, &potential)?,
            r2_floor: trace_obstruction(&build.pair, &potential)?,
            hermiticity_defect: build.matrix.hermiticity_defect(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mub = setup.build(HamiltonianKind::Mub)?;
    let fd = setup.build(HamiltonianKind::FdStar)?;
    let pairs = vec![
        pair_check("mub", &mub.pair, &potential, setup.steps.mub)?,
        pair_check("fd", &fd.pair, &potential, setup.steps.fd_star)?,
    ];
    Ok(CheckData { families, pairs })
}
