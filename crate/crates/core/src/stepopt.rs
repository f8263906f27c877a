//! Grid-step selection: choose `a` to minimize the largest eigenvalue of `H(a)`.
//!
//! A coarse uniform pre-scan seeds the bracket, then golden-section search narrows
//! it. Unimodality is assumed by the search and checked along the way.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::hamiltonians::{build_family, CSetting, HamiltonianKind, PotentialSpec};
use crate::matkit::{eig_hermitian, ComplexMatrix};
use crate::operators::GridSpec;

pub const DEFAULT_BRACKET: (f64, f64) = (0.01, 1.0);
pub const DEFAULT_TOL: f64 = 1e-4;
pub const PRESCAN_POINTS: usize = 20;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub a: f64,
    pub lambda_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSearchResult {
    pub a_star: f64,
    pub lambda_max: f64,
    /// Pre-scan followed by golden-section probes, in evaluation order.
    pub trace: Vec<Probe>,
    /// Final bracket around `a_star`.
    pub bracket: (f64, f64),
    /// Bracket narrowed below `tol`, minimum interior, and no unimodality violation.
    pub converged: bool,
    pub unimodal: bool,
    /// Pre-scan minimum sat on an end of the search interval.
    pub boundary_minimum: bool,
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    let e = eig_hermitian(h)?;
    Ok(e.eigenvalues.last().map_or(f64::NEG_INFINITY, |z| z.re))
}

/// Golden-section minimization of `a ↦ λ_max(builder(a))` on `[a_lo, a_hi]`.
pub fn minimize_max_eig<F>(
    builder: F,
    a_lo: f64,
    a_hi: f64,
    tol: f64,
    exec: Execution,
) -> Result<StepSearchResult>
where
    F: Fn(f64) -> Result<ComplexMatrix> + Sync,
{
    if !(a_lo > 0.0 && a_hi > a_lo && a_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < a_lo < a_hi, got [{a_lo}, {a_hi}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let f = |a: f64| builder(a).and_then(|h| lambda_max(&h));

    let step = (a_hi - a_lo) / (PRESCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|j| a_lo + step * j as f64)
        .collect();
    let values = map_indexed(exec, PRESCAN_POINTS, |j| f(grid[j]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut trace: Vec<Probe> = grid
        .iter()
        .zip(&values)
        .map(|(&a, &l)| Probe { a, lambda_max: l })
        .collect();

    let best = (0..PRESCAN_POINTS)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    let boundary_minimum = best == 0 || best + 1 == PRESCAN_POINTS;
    let mut unimodal = !boundary_minimum && prescan_unimodal(&values);

    let (mut lo, mut hi) = (
        grid[best.saturating_sub(1)],
        grid[(best + 1).min(PRESCAN_POINTS - 1)],
    );
    let (mut f_lo, mut f_hi) = (
        values[best.saturating_sub(1)],
        values[(best + 1).min(PRESCAN_POINTS - 1)],
    );
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    trace.push(Probe {
        a: c,
        lambda_max: fc,
    });
    trace.push(Probe {
        a: d,
        lambda_max: fd,
    });
    while hi - lo > tol {
        // The interior minimum must not exceed either bracket end.
        if fc.min(fd) > f_lo.max(f_hi) {
            unimodal = false;
        }
        if fc <= fd {
            hi = d;
            f_hi = fd;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
            trace.push(Probe {
                a: c,
                lambda_max: fc,
            });
        } else {
            lo = c;
            f_lo = fc;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
            trace.push(Probe {
                a: d,
                lambda_max: fd,
            });
        }
    }
    let (a_star, lambda) = if fc <= fd { (c, fc) } else { (d, fd) };
    if lambda > f_lo || lambda > f_hi {
        unimodal = false;
    }
    Ok(StepSearchResult {
        a_star,
        lambda_max: lambda,
        trace,
        bracket: (lo, hi),
        converged: unimodal && !boundary_minimum,
        unimodal,
        boundary_minimum,
    })
}

/// Non-increasing then non-decreasing, up to a relative slack of `1e-12`.
fn prescan_unimodal(values: &[f64]) -> bool {
    let slack = 1e-12 * values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] + slack {
            rising = true;
        } else if rising && w[1] < w[0] - slack {
            return false;
        }
    }
    true
}

/// Step search for one of the built-in Hamiltonian families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepProblem {
    pub kind: HamiltonianKind,
    /// Template grid; `a` and, for half-line grids, `x_offset` follow the probe.
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    pub c: CSetting,
}

impl StepProblem {
    /// Grid at step `a`. A template with `x_offset == a` stays a half-line grid.
    pub fn grid_at(&self, a: f64) -> GridSpec {
        let half_line = self.grid.x_offset == self.grid.a;
        GridSpec {
            a,
            x_offset: if half_line { a } else { self.grid.x_offset },
            ..self.grid
        }
    }

    pub fn build(&self, a: f64) -> Result<ComplexMatrix> {
        Ok(build_family(self.kind, &self.grid_at(a), &self.potential, self.c)?.matrix)
    }

    pub fn search(
        &self,
        a_lo: f64,
        a_hi: f64,
        tol: f64,
        exec: Execution,
    ) -> Result<StepSearchResult> {
        minimize_max_eig(|a| self.build(a), a_lo, a_hi, tol, exec)
    }
}

/// Mean absolute error over the lowest `n_states` levels.
pub fn fit_quality(numeric: &[f64], exact: &[f64], n_states: usize) -> Result<f64> {
    let have = numeric.len().min(exact.len());
    if have < n_states {
        return Err(Error::LengthShortfall {
            needed: n_states,
            got: have,
        });
    }
    if n_states == 0 {
        return Ok(0.0);
    }
    Ok(numeric
        .iter()
        .zip(exact)
        .take(n_states)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / n_states as f64)
}
