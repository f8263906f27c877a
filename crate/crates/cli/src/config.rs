//! Run configuration: JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use fdqm_core::figures::{FigureSetup, Steps};
use fdqm_core::hamiltonians::{CSetting, HamiltonianKind};
use fdqm_core::operators::MomentumLabels;
use fdqm_core::stepopt::{DEFAULT_BRACKET, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub hbar: f64,
    pub mass: f64,
    pub labels: MomentumLabels,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 30,
            hbar: 1.0,
            mass: 1.0,
            labels: MomentumLabels::Symmetric,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub name: String,
    pub omega: f64,
    pub g: f64,
    /// Diagonal constant of the `*_star` Hamiltonians: a number or `"kinetic"`.
    pub c: CSetting,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            name: "singular_oscillator".into(),
            omega: 10.0,
            g: 1.0,
            c: CSetting::KINETIC,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StepRule {
    Optimize,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepRules {
    pub fd_star: StepRule,
    pub mub_star: StepRule,
    pub mub: StepRule,
}

impl Default for StepRules {
    fn default() -> Self {
        let s = Steps::default();
        Self {
            fd_star: StepRule::Fixed(s.fd_star),
            mub_star: StepRule::Fixed(s.mub_star),
            mub: StepRule::Fixed(s.mub),
        }
    }
}

impl StepRules {
    pub fn get(&self, kind: HamiltonianKind) -> StepRule {
        match kind {
            HamiltonianKind::FdStar => self.fd_star,
            HamiltonianKind::MubStar => self.mub_star,
            _ => self.mub,
        }
    }

    pub fn set_all(&mut self, rule: StepRule) {
        self.fd_star = rule;
        self.mub_star = rule;
        self.mub = rule;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub bracket: (f64, f64),
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            bracket: DEFAULT_BRACKET,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NogoConfig {
    pub sizes: Vec<usize>,
    /// Instances per theorem and size.
    pub count: usize,
}

impl Default for NogoConfig {
    fn default() -> Self {
        Self {
            sizes: vec![4, 6, 8],
            count: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub potential: PotentialConfig,
    pub hamiltonians: Vec<HamiltonianKind>,
    pub step_rule: StepRules,
    pub search: SearchConfig,
    /// Levels entering the spectrum fit.
    pub n_states: usize,
    /// Eigenvector indices written by `fig2`, one file each.
    pub eigenvector_index: Vec<usize>,
    pub seed: u64,
    pub nogo: NogoConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            potential: PotentialConfig::default(),
            hamiltonians: vec![
                HamiltonianKind::FdStar,
                HamiltonianKind::MubStar,
                HamiltonianKind::Mub,
            ],
            step_rule: StepRules::default(),
            search: SearchConfig::default(),
            n_states: 20,
            eigenvector_index: vec![19, 20],
            seed: 42,
            nogo: NogoConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Command-line values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub a: Option<f64>,
    pub omega: Option<f64>,
    pub g: Option<f64>,
    pub c: Option<CSetting>,
    pub sizes: Option<Vec<usize>>,
}

/// 1-based line of the first occurrence of `"key"` in the source, if any.
fn line_of(source: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    source
        .lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

fn invalid(source: Option<&str>, field: &str, message: String) -> CliError {
    let key = field.rsplit('.').next().unwrap_or(field);
    match source.and_then(|s| line_of(s, key)) {
        Some(line) => CliError::Config(format!("line {line}: `{field}`: {message}")),
        None => CliError::Config(format!("`{field}`: {message}")),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        config.validate(Some(text))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(p) = &o.output {
            self.output_dir = p.clone();
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(n) = o.n {
            self.grid.n = n;
        }
        if let Some(a) = o.a {
            self.step_rule.set_all(StepRule::Fixed(a));
        }
        if let Some(w) = o.omega {
            self.potential.omega = w;
        }
        if let Some(g) = o.g {
            self.potential.g = g;
        }
        if let Some(c) = o.c {
            self.potential.c = c;
        }
        if let Some(s) = &o.sizes {
            self.nogo.sizes = s.clone();
        }
        self.validate(None)
    }

    /// Semantic checks; `source` lets messages point at the offending line.
    pub fn validate(&self, source: Option<&str>) -> Result<(), CliError> {
        let bad = |field: &str, message: String| Err(invalid(source, field, message));
        if self.grid.n < 3 {
            return bad("grid.n", format!("must be at least 3, got {}", self.grid.n));
        }
        if self.grid.hbar != 1.0 || self.grid.mass != 1.0 {
            return bad(
                "grid.hbar",
                "the closed-form reference is implemented for hbar = m = 1".into(),
            );
        }
        if self.potential.name != "singular_oscillator" {
            return bad(
                "potential.name",
                format!(
                    "only \"singular_oscillator\" is supported, got {:?}",
                    self.potential.name
                ),
            );
        }
        if !(self.potential.omega > 0.0 && self.potential.omega.is_finite()) {
            return bad(
                "potential.omega",
                format!("must be positive, got {}", self.potential.omega),
            );
        }
        if !(self.potential.g >= 0.0 && self.potential.g.is_finite()) {
            return bad(
                "potential.g",
                format!("must be non-negative, got {}", self.potential.g),
            );
        }
        if let CSetting::Fixed(c) = self.potential.c {
            if !c.is_finite() {
                return bad("potential.c", "must be finite".into());
            }
        }
        if self.hamiltonians.is_empty() {
            return bad(
                "hamiltonians",
                "select at least one of fd_star, mub_star, mub".into(),
            );
        }
        if self.hamiltonians.contains(&HamiltonianKind::Custom) {
            return bad(
                "hamiltonians",
                "custom Hamiltonians cannot be run from the command line".into(),
            );
        }
        for (name, rule) in [
            ("step_rule.fd_star", self.step_rule.fd_star),
            ("step_rule.mub_star", self.step_rule.mub_star),
            ("step_rule.mub", self.step_rule.mub),
        ] {
            if let StepRule::Fixed(a) = rule {
                if !(a > 0.0 && a.is_finite()) {
                    return bad(name, format!("step must be positive, got {a}"));
                }
            }
        }
        let (lo, hi) = self.search.bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return bad(
                "search.bracket",
                format!("need 0 < lo < hi, got [{lo}, {hi}]"),
            );
        }
        if !(self.search.tol > 0.0) {
            return bad(
                "search.tol",
                format!("must be positive, got {}", self.search.tol),
            );
        }
        if self.n_states == 0 || self.n_states > self.grid.n {
            return bad(
                "n_states",
                format!("must be in 1..={}, got {}", self.grid.n, self.n_states),
            );
        }
        if self.eigenvector_index.is_empty() {
            return bad("eigenvector_index", "list at least one index".into());
        }
        if let Some(&k) = self.eigenvector_index.iter().find(|&&k| k >= self.grid.n) {
            return bad(
                "eigenvector_index",
                format!("index {k} is not below N = {}", self.grid.n),
            );
        }
        if self.nogo.sizes.is_empty() {
            return bad("nogo.sizes", "list at least one size".into());
        }
        if let Some(&s) = self.nogo.sizes.iter().find(|&&s| !(2..=16).contains(&s)) {
            return bad("nogo.sizes", format!("sizes must lie in 2..=16, got {s}"));
        }
        if self.nogo.count == 0 {
            return bad("nogo.count", "must be positive".into());
        }
        Ok(())
    }

    pub fn selected(&self, kind: HamiltonianKind) -> bool {
        self.hamiltonians.contains(&kind)
    }

    /// Figure setup with the given resolved steps.
    pub fn setup(&self, steps: Steps) -> FigureSetup {
        FigureSetup {
            n: self.grid.n,
            hbar: self.grid.hbar,
            mass: self.grid.mass,
            omega: self.potential.omega,
            g: self.potential.g,
            c: self.potential.c,
            labels: self.grid.labels,
            steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_default() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn default_round_trips() {
        let text = serde_json::to_string_pretty(&RunConfig::default()).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), RunConfig::default());
    }

    #[test]
    fn step_rules_parse() {
        let c = RunConfig::from_json(
            r#"{"step_rule": {"mub": "optimize", "fd_star": {"fixed": 0.1}}}"#,
        )
        .unwrap();
        assert_eq!(c.step_rule.mub, StepRule::Optimize);
        assert_eq!(c.step_rule.fd_star, StepRule::Fixed(0.1));
        assert_eq!(c.step_rule.mub_star, StepRule::Fixed(0.145));
    }

    #[test]
    fn c_accepts_number_or_kinetic() {
        let c = RunConfig::from_json(r#"{"potential": {"c": 0}}"#).unwrap();
        assert_eq!(c.potential.c, CSetting::Fixed(0.0));
        let c = RunConfig::from_json(r#"{"potential": {"c": "kinetic"}}"#).unwrap();
        assert_eq!(c.potential.c, CSetting::KINETIC);
    }

    #[test]
    fn unknown_field_reports_its_line() {
        let err = RunConfig::from_json("{\n  \"grid\": {\n    \"size\": 3\n  }\n}").unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.starts_with("line 3"), "{msg}");
        assert!(msg.contains("size"), "{msg}");
    }

    #[test]
    fn semantic_error_reports_its_line() {
        let err =
            RunConfig::from_json("{\n  \"grid\": {\n    \"n\": 30\n  },\n  \"n_states\": 40\n}")
                .unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.starts_with("line 5: `n_states`"), "{msg}");
    }

    #[test]
    fn overrides_apply_and_validate() {
        let mut c = RunConfig::default();
        c.apply(&Overrides {
            a: Some(0.12),
            c: Some(CSetting::Fixed(1.5)),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!(
            c.step_rule.get(HamiltonianKind::FdStar),
            StepRule::Fixed(0.12)
        );
        assert_eq!(c.potential.c, CSetting::Fixed(1.5));
        // The default fig2 indices no longer fit.
        let shrink = Overrides {
            n: Some(12),
            ..Overrides::default()
        };
        assert!(matches!(c.apply(&shrink), Err(CliError::Config(_))));
    }
}
