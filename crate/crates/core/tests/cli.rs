use std::path::Path;
use std::process::{Command, Output};

use besov_morrey::harness::report::NormReport;

const SMALL: &str = r#"{
    "schema": 1,
    "corpus": [
        {"name": "bump", "family": "gaussian", "center": [0.0], "width": 0.5},
        {"name": "kink", "family": "cusp", "exponent": 0.3, "cutoff": 1.0}
    ],
    "domains": [{"name": "line", "domain": {"kind": "full_space", "window": {"lo": [-4.0], "hi": [4.0]}}}],
    "params": [{"name": "bm", "params": {"d": 1, "s": 0.7, "p": 1.5, "q": 2, "v": 2, "N": 2, "T": 1, "R": 1,
                 "family": {"kind": "besov_morrey", "u": 3.0}}}],
    "grid_sizes": [256],
    "flavors": ["osc", "diff", "lp"],
    "comparisons": [["osc", "lp"]],
    "threads": 1
}"#;

fn bin(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov-morrey"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn compare_writes_reports_that_reload_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let run = bin(&["compare", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["schema"], 1);
    let report = NormReport::from_json(&text).unwrap();
    assert_eq!(report.to_json().unwrap(), text);
    assert_eq!(report.cells.len(), 6);
    assert!(report.invariants.iter().all(|i| i.passed));

    let csv = std::fs::read_to_string(out.join("levels.csv")).unwrap();
    assert!(csv.lines().count() > 6);
}

#[test]
fn norm_on_stdout_selects_one_function() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = bin(&["norm", "--function", "kink", "--flavor", "osc"], &cfg);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let json: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(json["schema"], 1);
    let cells = json["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0]["function"], "kink");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();

    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(bin(&["compare"], &cfg).status.code(), Some(2));

    let cfg = write_config(dir.path(), &SMALL.replace(r#""schema": 1"#, r#""schema": 9"#));
    assert_eq!(bin(&["compare"], &cfg).status.code(), Some(2));

    let interval = SMALL.replace(
        r#"{"kind": "full_space", "window": {"lo": [-4.0], "hi": [4.0]}}"#,
        r#"{"kind": "box_window", "parameters": {"lo": [-3.0], "hi": [3.0]}, "window": {"lo": [-4.0], "hi": [4.0]}}"#,
    );
    let cfg = write_config(dir.path(), &interval);
    let run = bin(&["compare"], &cfg);
    assert_eq!(run.status.code(), Some(2), "{}", String::from_utf8_lossy(&run.stderr));

    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(bin(&["norm", "--function", "missing"], &cfg).status.code(), Some(2));
}

#[test]
fn a_tight_tolerance_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = bin(&["compare", "--tolerance", "1.0001"], &cfg);
    assert_eq!(run.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert!(json["ratios"][0]["cells"].as_array().unwrap().iter().any(|c| c["within_bound"] == false));
}
