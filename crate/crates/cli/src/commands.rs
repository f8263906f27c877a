//! The five subcommands. Each writes its files and returns any numerical-contract
//! violations it found; the files are written either way so they can be inspected.

use std::path::PathBuf;
use std::time::SystemTime;

use fdqm_core::figures::{
    check_data, fig1_data, fig2_data, FamilyCheck, PairCheck, Steps, FAMILIES,
};
use fdqm_core::hamiltonians::{CSetting, HamiltonianKind};
use fdqm_core::matkit::hermitian_tolerance;
use fdqm_core::nogo::{
    random_batch, BatchConfig, BatchEntry, TheoremId, WitnessDetails, OBSTRUCTED_REL,
};
use fdqm_core::stepopt::{StepProblem, StepSearchResult};
use fdqm_core::Execution;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{RunConfig, StepRule};
use crate::output::{
    num, opt_num, output_path, write_json, CsvTable, Provenance, Report, SCHEMA_VERSION, TOOL,
    VERSION,
};
use crate::CliError;

/// Files written and contract violations found by one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub violations: Vec<String>,
}

const EXEC: Execution = Execution::Parallel;

/// Largest allowed `r1_rel` for the Hamiltonians built to satisfy it.
pub const R1_BY_CONSTRUCTION: f64 = 1e-10;
/// Smallest `r1_rel` expected of `p²/2m + U`.
pub const R1_VIOLATION_MIN: f64 = 1e-3;
pub const NORMALIZATION_TOL: f64 = 1e-10;
pub const IMAGINARY_TOL: f64 = 1e-8;
pub const WITNESS_REL_TOL: f64 = 1e-7;
pub const ZERO_SOLUTION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepChoice {
    pub kind: HamiltonianKind,
    pub rule: StepRule,
    pub a: f64,
    /// Present when the step was optimized.
    pub search: Option<SearchSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub c: CSetting,
    pub a_star: f64,
    pub lambda_max: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    pub converged: bool,
    pub unimodal: bool,
    pub boundary_minimum: bool,
}

impl SearchSummary {
    fn new(c: CSetting, r: &StepSearchResult) -> Self {
        Self {
            c,
            a_star: r.a_star,
            lambda_max: r.lambda_max,
            bracket: r.bracket,
            evaluations: r.trace.len(),
            converged: r.converged,
            unimodal: r.unimodal,
            boundary_minimum: r.boundary_minimum,
        }
    }
}

fn search(
    config: &RunConfig,
    kind: HamiltonianKind,
    c: CSetting,
) -> Result<StepSearchResult, CliError> {
    let setup = config.setup(Steps::default());
    let problem = StepProblem {
        kind,
        grid: setup.grid(kind),
        potential: setup.potential(),
        c,
    };
    let (lo, hi) = config.search.bracket;
    Ok(problem.search(lo, hi, config.search.tol, EXEC)?)
}

/// Steps for all three families, running the search where the rule asks for it.
pub fn resolve_steps(config: &RunConfig) -> Result<(Steps, Vec<StepChoice>), CliError> {
    let mut steps = Steps::default();
    let mut choices = Vec::new();
    for kind in FAMILIES {
        let rule = config.step_rule.get(kind);
        let (a, summary) = match rule {
            StepRule::Fixed(a) => (a, None),
            StepRule::Optimize => {
                let r = search(config, kind, config.potential.c)?;
                (r.a_star, Some(SearchSummary::new(config.potential.c, &r)))
            }
        };
        steps.set(kind, a);
        choices.push(StepChoice {
            kind,
            rule,
            a,
            search: summary,
        });
    }
    Ok((steps, choices))
}

fn common_metadata(table: &mut CsvTable, config: &RunConfig, choices: &[StepChoice]) {
    table.meta("tool", format!("{TOOL} {VERSION}"));
    table.meta("N", config.grid.n);
    table.meta("hbar", num(config.grid.hbar));
    table.meta("mass", num(config.grid.mass));
    table.meta(
        "momentum_labels",
        serde_json::to_value(config.grid.labels)
            .unwrap_or_default()
            .as_str()
            .unwrap_or(""),
    );
    table.meta("potential", &config.potential.name);
    table.meta("omega", num(config.potential.omega));
    table.meta("g", num(config.potential.g));
    table.meta("C", config.potential.c);
    for ch in choices {
        let rule = match ch.rule {
            StepRule::Fixed(_) => "fixed".to_string(),
            StepRule::Optimize => {
                let s = ch.search.as_ref().expect("optimized steps carry a search");
                format!("optimized (converged={})", s.converged)
            }
        };
        table.meta(
            format!("a_{}", ch.kind.label()),
            format!("{} [{rule}]", num(ch.a)),
        );
    }
}

pub fn fig1(config: &RunConfig) -> Result<Outcome, CliError> {
    let (steps, choices) = resolve_steps(config)?;
    let setup = config.setup(steps);
    let data = fig1_data(&setup, config.n_states, EXEC)?;

    let mut t = CsvTable::default();
    common_metadata(&mut t, config, &choices);
    for f in &data.families {
        if config.selected(f.kind) {
            let label = f.kind.label();
            t.meta(format!("C_{label}"), num(f.c));
            t.meta(
                format!("mean_abs_error_{label} (lowest {})", data.fit_states),
                num(f.fit),
            );
            t.meta(
                format!("ground_state_error_{label}"),
                num(f.ground_state_error),
            );
        }
    }
    t.header = ["state_index", "E_exact", "E_fd_star", "E_mub_star", "E_mub"]
        .map(String::from)
        .to_vec();
    let pick = |kind, v: f64| opt_num(config.selected(kind).then_some(v));
    for r in &data.rows {
        t.rows.push(vec![
            r.state_index.to_string(),
            num(r.e_exact),
            pick(HamiltonianKind::FdStar, r.e_fd_star),
            pick(HamiltonianKind::MubStar, r.e_mub_star),
            pick(HamiltonianKind::Mub, r.e_mub),
        ]);
    }
    let path = output_path(config, "fig1.csv");
    t.write(&path)?;
    Ok(Outcome {
        written: vec![path],
        violations: Vec::new(),
    })
}

pub fn fig2(config: &RunConfig) -> Result<Outcome, CliError> {
    let (steps, choices) = resolve_steps(config)?;
    let setup = config.setup(steps);
    let mut outcome = Outcome::default();
    for &index in &config.eigenvector_index {
        let data = fig2_data(&setup, index, &config.eigenvector_index, EXEC)?;
        let mut t = CsvTable::default();
        common_metadata(&mut t, config, &choices);
        t.meta(
            "eigenvector_index",
            format!("{index} (zero-based; 0 is the ground state)"),
        );
        t.meta(
            "normalization",
            "v columns hold v_k/sqrt(a) with sum v_k^2 = 1 on their own grid; psi_exact is the continuum-normalized closed form",
        );
        t.meta(
            "sign_convention",
            "each column is phased so its overlap with the sampled exact state is positive",
        );
        for o in data.overlaps.iter().filter(|o| config.selected(o.kind)) {
            t.meta(
                format!("overlap_{}_n{}", o.kind.label(), o.index),
                num(o.overlap),
            );
        }
        for (kind, norm) in &data.exact_grid_norms {
            if config.selected(*kind) {
                t.meta(format!("exact_grid_norm_{}", kind.label()), num(*norm));
            }
        }
        for (kind, im) in &data.dropped_imaginary {
            if config.selected(*kind) {
                t.meta(format!("dropped_imaginary_{}", kind.label()), num(*im));
                if *im > IMAGINARY_TOL {
                    outcome.violations.push(format!(
                        "eigenvector {index} of {} keeps an imaginary part {im:e} after phase alignment",
                        kind.label()
                    ));
                }
            }
        }
        t.header = ["x", "psi_exact", "v_fd_star", "v_mub_star", "v_mub"]
            .map(String::from)
            .to_vec();
        let gate = |kind, v: Option<f64>| opt_num(v.filter(|_| config.selected(kind)));
        for r in &data.rows {
            t.rows.push(vec![
                num(r.x),
                num(r.psi_exact),
                gate(HamiltonianKind::FdStar, r.v_fd_star),
                gate(HamiltonianKind::MubStar, r.v_mub_star),
                gate(HamiltonianKind::Mub, r.v_mub),
            ]);
        }
        for (kind, column) in [
            (HamiltonianKind::FdStar, 0usize),
            (HamiltonianKind::MubStar, 1),
            (HamiltonianKind::Mub, 2),
        ] {
            let a = setup.steps.get(kind);
            let norm: f64 = data
                .rows
                .iter()
                .filter_map(|r| [r.v_fd_star, r.v_mub_star, r.v_mub][column])
                .map(|v| v * v * a)
                .sum();
            if config.selected(kind) && (norm - 1.0).abs() > NORMALIZATION_TOL {
                outcome.violations.push(format!(
                    "{} column of eigenvector {index} has norm {norm}",
                    kind.label()
                ));
            }
        }
        let path = output_path(config, &format!("fig2_n{index}.csv"));
        t.write(&path)?;
        outcome.written.push(path);
    }
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResults {
    pub steps: Vec<StepChoice>,
    pub families: Vec<FamilyCheck>,
    pub pairs: Vec<PairCheck>,
}

pub fn check(config: &RunConfig) -> Result<Outcome, CliError> {
    let started = SystemTime::now();
    let (steps, choices) = resolve_steps(config)?;
    let setup = config.setup(steps);
    let data = check_data(&setup, EXEC)?;
    let mut violations = Vec::new();
    let families: Vec<FamilyCheck> = data
        .families
        .into_iter()
        .filter(|f| config.selected(f.kind))
        .collect();
    let mut tolerances = serde_json::Map::new();
    for f in &families {
        let build = setup.build(f.kind)?;
        let tol = hermitian_tolerance(&build.matrix);
        tolerances.insert(f.kind.label().into(), json!(tol));
        if f.hermiticity_defect > tol {
            violations.push(format!(
                "{} has Hermiticity defect {:e} > {tol:e}",
                f.kind.label(),
                f.hermiticity_defect
            ));
        }
        if f.kind != HamiltonianKind::Mub && f.residuals.r1_rel > R1_BY_CONSTRUCTION {
            violations.push(format!(
                "{} violates the first relation: r1_rel = {:e}",
                f.kind.label(),
                f.residuals.r1_rel
            ));
        }
        if !(f.residuals.r2 >= f.r2_floor * (1.0 - 1e-12)) {
            violations.push(format!(
                "{} has r2 = {:e} below its trace bound {:e}",
                f.kind.label(),
                f.residuals.r2,
                f.r2_floor
            ));
        }
    }
    let thresholds = json!({
        "r1_rel_max_by_construction": R1_BY_CONSTRUCTION,
        "r1_rel_min_for_mub": R1_VIOLATION_MIN,
        "r2_floor": "per family: hbar * |trace U'(x)| / sqrt(N)",
        "hermiticity_tolerance": tolerances,
        "function_defect_floor": "sqrt(N), the trace bound for [A, B] = f'(A)",
    });
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "check".into(),
        config: config.clone(),
        thresholds,
        results: CheckResults {
            steps: choices,
            families,
            pairs: data.pairs,
        },
        provenance: Provenance::now(started),
    };
    let path = output_path(config, "check.json");
    write_json(&path, &report)?;
    Ok(Outcome {
        written: vec![path],
        violations,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NogoSize {
    pub n: usize,
    pub seed: u64,
    pub entries: Vec<BatchEntry>,
}

/// Seed of the batch for `size`, derived from the run seed.
pub fn batch_seed(seed: u64, size: usize) -> u64 {
    seed ^ ((size as u64) << 32)
}

pub fn nogo(config: &RunConfig) -> Result<Outcome, CliError> {
    let started = SystemTime::now();
    let mut violations = Vec::new();
    let mut results = Vec::new();
    for &n in &config.nogo.sizes {
        let seed = batch_seed(config.seed, n);
        let batch = BatchConfig {
            seed,
            count: config.nogo.count,
            n,
            theorems: TheoremId::ALL.to_vec(),
        };
        let entries = random_batch(&batch, EXEC)?;
        for e in &entries {
            let w = &e.witness;
            let tag = format!("{} instance {} (N={n})", e.theorem_id.label(), e.index);
            if e.oracle_rel_diff > WITNESS_REL_TOL {
                violations.push(format!(
                    "{tag}: oracle disagreement {:e}",
                    e.oracle_rel_diff
                ));
            }
            match e.theorem_id {
                TheoremId::T1 | TheoremId::T3 => {
                    let rel = (w.min_residual - w.analytic_bound).abs() / w.scale;
                    if rel > WITNESS_REL_TOL {
                        violations.push(format!(
                            "{tag}: residual differs from hbar*|p|_F by {rel:e}"
                        ));
                    }
                }
                TheoremId::L1 => {
                    if let WitnessDetails::NonHermitian { x_norm, .. } = w.details {
                        if x_norm > ZERO_SOLUTION_TOL {
                            violations.push(format!("{tag}: p = 0 gives |x| = {x_norm:e}"));
                        }
                    }
                }
                TheoremId::T4 => {
                    if let WitnessDetails::NonHermitian {
                        feasible_p_norm, ..
                    } = w.details
                    {
                        if feasible_p_norm > 1e-9 * w.scale {
                            violations.push(format!(
                                "{tag}: feasible momentum weight {feasible_p_norm:e}"
                            ));
                        }
                    }
                }
            }
        }
        results.push(NogoSize { n, seed, entries });
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "nogo".into(),
        config: config.clone(),
        thresholds: json!({
            "obstructed_rel": OBSTRUCTED_REL,
            "witness_rel_tol": WITNESS_REL_TOL,
            "zero_solution_tol": ZERO_SOLUTION_TOL,
            "feasible_p_rel_tol": 1e-9,
        }),
        results,
        provenance: Provenance::now(started),
    };
    let path = output_path(config, "nogo.json");
    write_json(&path, &report)?;
    Ok(Outcome {
        written: vec![path],
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepsizeEntry {
    pub kind: HamiltonianKind,
    /// Step used by the figures when it is not optimized.
    pub reference_a: f64,
    pub searches: Vec<SearchSummary>,
}

pub fn stepsize(config: &RunConfig) -> Result<Outcome, CliError> {
    let started = SystemTime::now();
    let reference = Steps::default();
    let mut results = Vec::new();
    let mut violations = Vec::new();
    for kind in FAMILIES.into_iter().filter(|k| config.selected(*k)) {
        let mut settings = vec![config.potential.c];
        // `C` moves the optimum of the *_star families; report the C = 0 search too.
        if kind != HamiltonianKind::Mub && config.potential.c != CSetting::Fixed(0.0) {
            settings.push(CSetting::Fixed(0.0));
        }
        let mut searches = Vec::new();
        for c in settings {
            let r = search(config, kind, c)?;
            if !r.lambda_max.is_finite() {
                violations.push(format!("{}: non-finite largest eigenvalue", kind.label()));
            }
            searches.push(SearchSummary::new(c, &r));
        }
        results.push(StepsizeEntry {
            kind,
            reference_a: reference.get(kind),
            searches,
        });
    }
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "stepsize".into(),
        config: config.clone(),
        thresholds: json!({
            "tol": config.search.tol,
            "bracket": config.search.bracket,
            "reference_agreement": 0.01,
        }),
        results,
        provenance: Provenance::now(started),
    };
    let path = output_path(config, "stepsize.json");
    write_json(&path, &report)?;
    Ok(Outcome {
        written: vec![path],
        violations,
    })
}
