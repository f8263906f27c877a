use std::path::{Path, PathBuf};
use std::process::Command as Process;

use clap::Parser;
use fdqm_cli::commands::CheckResults;
use fdqm_cli::output::{validate_report, Report};
use fdqm_cli::{run, Cli, CliError, EXIT_CONFIG, EXIT_NUMERICAL};
use serde_json::Value;

fn run_args(out: &Path, args: &[&str]) -> Result<Vec<PathBuf>, CliError> {
    let mut argv = vec!["fdqm"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--output", out.to_str().unwrap()]);
    run(&Cli::try_parse_from(argv).unwrap()).map(|o| o.written)
}

/// Metadata map and data rows of one of our CSV files.
fn read_csv(path: &Path) -> (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let meta = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .map(|l| {
            let (k, v) = l.split_once(": ").unwrap();
            (k.to_string(), v.to_string())
        })
        .collect();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (meta, header, rows)
}

fn meta<'a>(m: &'a [(String, String)], key: &str) -> &'a str {
    &m.iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
}

fn meta_f64(m: &[(String, String)], key: &str) -> f64 {
    meta(m, key)
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn fig1_default_shape_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_args(dir.path(), &["fig1"]).unwrap();
    let (m, header, rows) = read_csv(&files[0]);
    assert_eq!(
        header,
        ["state_index", "E_exact", "E_fd_star", "E_mub_star", "E_mub"]
    );
    assert_eq!(rows.len(), 30);
    assert!(m.len() >= 4);
    assert_eq!(meta_f64(&m, "a_fd_star"), 0.09);
    assert_eq!(meta_f64(&m, "a_mub"), 0.145);
    assert_eq!(meta(&m, "C"), "kinetic");

    let col = |r: &Vec<String>, k: usize| r[k].parse::<f64>().unwrap();
    assert!((col(&rows[0], 1) - 9.330127018922193).abs() < 1e-12);
    assert!((col(&rows[1], 1) - 19.330127018922193).abs() < 1e-12);
    // The stencil Hamiltonian has the better ground state.
    let exact = col(&rows[0], 1);
    assert!((col(&rows[0], 2) - exact).abs() < (col(&rows[0], 4) - exact).abs());
}

#[test]
fn fig2_columns_are_normalized_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_args(dir.path(), &["fig2"]).unwrap();
    assert_eq!(files.len(), 2);
    for file in &files {
        let (m, header, rows) = read_csv(file);
        assert_eq!(
            header,
            ["x", "psi_exact", "v_fd_star", "v_mub_star", "v_mub"]
        );
        for (col, key) in [(2, "a_fd_star"), (3, "a_mub_star"), (4, "a_mub")] {
            let a = meta_f64(&m, key);
            let norm: f64 = rows
                .iter()
                .filter(|r| !r[col].is_empty())
                .map(|r| r[col].parse::<f64>().unwrap().powi(2) * a)
                .sum();
            assert!((norm - 1.0).abs() <= 1e-10, "{key}: {norm}");
        }
        for n in [19, 20] {
            let fd = meta_f64(&m, &format!("overlap_fd_star_n{n}"));
            let star = meta_f64(&m, &format!("overlap_mub_star_n{n}"));
            let mub = meta_f64(&m, &format!("overlap_mub_n{n}"));
            assert!(star > fd && mub > fd);
            // Both mutually-unbiased families track the exact state closely.
            assert!(star > 0.98 && mub > 0.98, "{star} {mub}");
        }
    }
}

#[test]
fn check_report_contracts_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_args(dir.path(), &["check"]).unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    validate_report(&text).unwrap();
    let report: Report<CheckResults> = serde_json::from_str(&text).unwrap();
    assert_eq!(report.command, "check");
    for f in &report.results.families {
        match f.kind.label() {
            "mub" => assert!(f.residuals.r1_rel > 1e-3),
            _ => assert!(f.residuals.r1_rel <= 1e-10),
        }
        assert!(f.residuals.r2_rel > 0.0);
        assert!(f.residuals.r2 >= f.r2_floor);
    }
    assert_eq!(report.results.pairs.len(), 2);
    // Round trip through the typed form is lossless.
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(
        serde_json::from_str::<Value>(&again).unwrap(),
        serde_json::from_str::<Value>(&text).unwrap()
    );
}

fn without_provenance(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("provenance");
    v
}

#[test]
fn nogo_seeded_batch() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_args(dir.path(), &["nogo", "--seed", "42", "--sizes", "4,6,8"]).unwrap();
    let v = without_provenance(&files[0]);
    let sizes = v["results"].as_array().unwrap();
    assert_eq!(sizes.len(), 3);
    let mut t1 = 0;
    for size in sizes {
        for e in size["entries"].as_array().unwrap() {
            let w = &e["witness"];
            match e["theorem_id"].as_str().unwrap() {
                "T1" => {
                    t1 += 1;
                    let (r, b, s) = (
                        w["min_residual"].as_f64().unwrap(),
                        w["analytic_bound"].as_f64().unwrap(),
                        w["scale"].as_f64().unwrap(),
                    );
                    assert!((r - b).abs() / s <= 1e-7);
                    assert!(e["oracle_rel_diff"].as_f64().unwrap() <= 1e-7);
                }
                "L1" => assert!(w["details"]["x_norm"].as_f64().unwrap() <= 1e-10),
                _ => {}
            }
        }
    }
    assert_eq!(t1, 24);

    // Same seed, same body.
    let again = run_args(dir.path(), &["nogo", "--seed", "42", "--sizes", "4,6,8"]).unwrap();
    assert_eq!(
        serde_json::to_string(&v).unwrap(),
        serde_json::to_string(&without_provenance(&again[0])).unwrap()
    );
}

#[test]
fn figure_csvs_are_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for cmd in ["fig1", "fig2"] {
        let fa = run_args(a.path(), &[cmd]).unwrap();
        let fb = run_args(b.path(), &[cmd]).unwrap();
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
    }
}

#[test]
fn stepsize_report() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_args(dir.path(), &["stepsize"]).unwrap();
    let v = without_provenance(&files[0]);
    for entry in v["results"].as_array().unwrap() {
        let searches = entry["searches"].as_array().unwrap();
        let kind = entry["kind"].as_str().unwrap();
        if kind != "fd_star" {
            let a = searches[0]["a_star"].as_f64().unwrap();
            assert!((a - 0.145).abs() <= 0.01, "{kind}: {a}");
            assert_eq!(searches[0]["converged"], Value::Bool(true));
        }
        // The *_star families also report the search without the constant.
        assert_eq!(searches.len(), if kind == "mub" { 1 } else { 2 });
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{
  "hamiltonians": ["mub_star", "mub"],
  "step_rule": {"mub": "optimize"},
  "eigenvector_index": [19]
}"#,
    )
    .unwrap();
    let files = run_args(
        dir.path(),
        &["fig1", "--config", cfg.to_str().unwrap(), "--C", "0"],
    )
    .unwrap();
    let (m, _, rows) = read_csv(&files[0]);
    assert_eq!(meta(&m, "C"), "0");
    assert!(meta(&m, "a_mub").contains("optimized (converged=true)"));
    // fd_star was not selected: its column is empty.
    assert!(rows.iter().all(|r| r[2].is_empty()));
}

fn binary(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_fdqm"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let ok = binary(&["fig1", "--output", out]);
    assert_eq!(ok.status.code(), Some(0));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\n  \"grid\": {\"n\": 30},\n  \"potential\": {\"omega\": -1}\n}",
    )
    .unwrap();
    let r = binary(&["check", "--config", bad.to_str().unwrap(), "--output", out]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
    let msg = String::from_utf8_lossy(&r.stderr);
    assert!(msg.contains("line 3"), "{msg}");

    let r = binary(&["fig1", "--n", "2", "--output", out]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
    let r = binary(&["fig1", "--C", "nope", "--output", out]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
    let r = binary(&["nogo", "--sizes", "40", "--output", out]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
    // Unknown flags are usage errors, which clap also reports with status 2.
    let r = binary(&["fig1", "--bogus"]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn numerical_errors_map_to_their_exit_code() {
    let e: CliError = fdqm_core::Error::NotHermitian {
        defect: 1.0,
        tolerance: 1e-12,
    }
    .into();
    assert_eq!(e.exit_code(), EXIT_NUMERICAL);
    let e: CliError = fdqm_core::Error::InvalidGrid("x".into()).into();
    assert_eq!(e.exit_code(), EXIT_CONFIG);
}
