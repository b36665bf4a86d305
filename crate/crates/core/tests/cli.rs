//! End-to-end checks of the `anlab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn anlab(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_anlab"));
    cmd.args(args).env_remove("ANLAB_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn small_run(out: &Path, extra: &[&str], env: &[(&str, &str)]) -> Output {
    let dir = out.to_str().unwrap();
    let mut args = vec!["run", "fig2", "--out", dir, "--alloc", "cpa", "--trials", "20000", "--no-plot"];
    args.extend_from_slice(extra);
    anlab(&args, env)
}

fn meta_seed(dir: &Path) -> u64 {
    let text = std::fs::read_to_string(dir.join("fig2.meta.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["seed"].as_u64().unwrap()
}

#[test]
fn list_figures_names_every_bundled_scenario() {
    let out = anlab(&["list-figures"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from {text}");
    }
}

#[test]
fn repeated_runs_write_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(small_run(&a, &["--seed", "7", "--workers", "1"], &[]).status.success());
    assert!(small_run(&b, &["--seed", "7", "--workers", "2"], &[]).status.success());
    let csv_a = std::fs::read(a.join("fig2.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("fig2.csv")).unwrap());
    assert!(String::from_utf8(csv_a).unwrap().starts_with("sweep_variable,"));
}

#[test]
fn seed_precedence_is_flag_then_env_then_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(small_run(&d.join("file"), &[], &[]).status.success());
    assert_eq!(meta_seed(&d.join("file")), 2016);
    assert!(small_run(&d.join("env"), &[], &[("ANLAB_SEED", "11")]).status.success());
    assert_eq!(meta_seed(&d.join("env")), 11);
    assert!(small_run(&d.join("flag"), &["--seed", "5"], &[("ANLAB_SEED", "11")]).status.success());
    assert_eq!(meta_seed(&d.join("flag")), 5);
}

#[test]
fn plot_is_written_unless_disabled() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = anlab(&["run", "fig2", "--out", dir, "--alloc", "cpa", "--trials", "20000"], &[]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(tmp.path().join("fig2.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn custom_allocation_takes_phi() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let base = ["run", "fig2", "--out", dir, "--trials", "20000", "--no-plot", "--alloc", "custom"];
    let missing = anlab(&base, &[]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("phi"));
    let mut args = base.to_vec();
    args.extend(["--phi", "1.5,1,0.5"]);
    assert!(anlab(&args, &[]).status.success());
}

#[test]
fn malformed_scenario_reports_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    let text = bundled_fig2().replace("n_t = 4", "n_t = \"four\"");
    std::fs::write(&path, text).unwrap();
    let out = anlab(&["run", path.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn optimize_alpha_adds_one_optimum_per_curve() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(small_run(tmp.path(), &["--optimize-alpha", "--grid", "50", "--refine", "1", "--mu-e", "inf"], &[]).status.success());
    let rows = anlab::experiments::table::read_rows(std::fs::File::open(tmp.path().join("fig2.csv")).unwrap()).unwrap();
    let optima: Vec<_> = rows.iter().filter(|r| r.kind == anlab::experiments::RowKind::Optimum).collect();
    // analytic and mc curves at one Eve regime
    assert_eq!(optima.len(), 2);
    assert!(optima.iter().all(|r| r.alpha_star.is_some()));
}

fn bundled_fig2() -> String {
    anlab::experiments::BUNDLED.iter().find(|(n, _)| *n == "fig2").unwrap().1.to_string()
}
