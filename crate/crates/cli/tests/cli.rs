use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hg"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .env("HG_THREADS", "1")
        .output()
        .expect("spawn hg")
}

fn with_config(dir: &Path, toml: &str, args: &[&str]) -> Output {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, toml).unwrap();
    let mut all = vec!["--config", path.to_str().unwrap()];
    all.extend_from_slice(args);
    hg(dir, &all)
}

fn report(dir: &Path, stem: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(format!("{stem}.json"))).unwrap()).unwrap()
}

#[test]
fn empty_catalog_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config(dir.path(), "[fefferman]\ncatalog = []\n", &["fefferman"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("catalog"));
}

#[test]
fn unknown_keys_and_bad_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(with_config(dir.path(), "bogus = 1\n", &["morrey-norm"]).status.code(), Some(2));
    assert_eq!(hg(dir.path(), &["morrey-norm", "--p", "-1"]).status.code(), Some(2));
    assert_eq!(hg(dir.path(), &["stummel", "--n", "0"]).status.code(), Some(2));
    assert_eq!(hg(dir.path(), &["morrey-norm", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
}

#[test]
fn morrey_norm_writes_report_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = hg(dir.path(), &["morrey-norm"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = report(dir.path(), "morrey_norm");
    assert_eq!(json["tool"], "hg");
    assert_eq!(json["command"], "morrey-norm");
    assert_eq!(json["config"]["n"], 3);
    let csvs: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(!csvs.is_empty());
    for e in csvs {
        let text = std::fs::read_to_string(e.path()).unwrap();
        assert!(!text.is_empty());
    }
}

#[test]
fn overrides_are_echoed_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config(dir.path(), "n = 3\nalpha = 1.5\n", &["bmo", "--alpha", "1.25", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = report(dir.path(), "bmo");
    assert_eq!(json["config"]["alpha"], 1.25);
    assert_eq!(json["config"]["tol"], 1e-6);
}

#[test]
fn stummel_of_critical_power_is_reported_divergent() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "[stummel]\nfield = { kind = \"radial_power\", exponent = 2.0 }\n";
    let out = with_config(dir.path(), toml, &["stummel", "--alpha", "1"]);
    assert!(matches!(out.status.code(), Some(0) | Some(1)));
    let text = std::fs::read_to_string(dir.path().join("out").join("stummel_curve.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("1")), "{text}");
}

#[test]
fn help_lists_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = hg(dir.path(), &["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in [
        "morrey-norm",
        "stummel",
        "check-phi",
        "maximal",
        "bmo",
        "fefferman",
        "kernel-lemma",
        "riesz-bound",
        "subrep",
        "counterexample",
        "vanishing",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}
