use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pushmatch_harness::report::load_report;
use tempfile::TempDir;

const SMALL: &str = r#"{
    "battery": {"count": 6},
    "lower_bound": {"scenarios": 2, "trials": 5},
    "checks": {"lp_pairs": 4, "gradient_points": 2, "bayes_trials": 3}
}"#;

fn pushmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pushmatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn out_path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn verify_small_config_passes_and_reports_render_identically() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let json = out_path(dir.path(), "report.json");
    let csv = out_path(dir.path(), "report.csv");

    let run = pushmatch(&["verify", "--config", &cfg, "--out", &json]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let run = pushmatch(&["verify", "--config", &cfg, "--format", "csv", "--out", &csv]);
    assert_eq!(run.status.code(), Some(0));

    let report = load_report(Path::new(&json)).unwrap();
    assert!(report.inconsistencies().is_empty());
    assert!(report.records.windows(2).all(|w| w[0].scenario <= w[1].scenario));

    let rerendered = out_path(dir.path(), "again.csv");
    let run = pushmatch(&["report", &json, "--format", "csv", "--out", &rerendered]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&rerendered).unwrap());
}

#[test]
fn zero_tolerance_forces_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"battery": {"count": 3}, "tolerances": {"conditional_tv": 0, "phi_value": 0},
            "checks": {"lp_pairs": 0, "gradient_points": 0, "bayes_trials": 0}}"#,
    );
    let out = out_path(dir.path(), "r.csv");
    let run = pushmatch(&["verify", "--config", &cfg, "--format", "csv", "--out", &out]);
    assert_eq!(run.status.code(), Some(1));
    assert!(fs::read_to_string(&out).unwrap().contains(",fail,"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"generators": ["renyi"]}"#);
    assert_eq!(pushmatch(&["verify", "--config", &bad]).status.code(), Some(2));
    let missing = out_path(dir.path(), "missing.json");
    assert_eq!(pushmatch(&["verify", "--config", &missing]).status.code(), Some(2));
    assert_eq!(pushmatch(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pushmatch(&["verify", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(pushmatch(&["gen", "--kind", "cubic"]).status.code(), Some(2));

    let run = Command::new(env!("CARGO_BIN_EXE_pushmatch"))
        .args(["gen", "--kind", "quadratic"])
        .env("PUSHMATCH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let run = Command::new(env!("CARGO_BIN_EXE_pushmatch"))
            .args(["verify", "--config", &cfg, "--format", "csv"])
            .env("PUSHMATCH_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(run.status.code(), Some(0));
        outputs.push(run.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn gen_is_deterministic_and_validates_params() {
    let dir = TempDir::new().unwrap();
    let a = pushmatch(&["gen", "--kind", "random_tabulated", "--seed", "9"]);
    let b = pushmatch(&["gen", "--kind", "random_tabulated", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let params = write(dir.path(), "p.json", r#"{"m": 1, "n": 2, "matrix": [[1.0], [1.0]], "theta_count": 4}"#);
    let run = pushmatch(&["gen", "--kind", "linear_overdetermined", "--config", &params]);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.contains("\"codomain_dim\": 2"));

    let params = write(dir.path(), "bad.json", r#"{"m": 20}"#);
    let run = pushmatch(&["gen", "--kind", "quadratic", "--config", &params]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn solve_canonical_instance() {
    let dir = TempDir::new().unwrap();
    let map = write(
        dir.path(),
        "map.json",
        r#"{"domain_dim": 1, "codomain_dim": 1,
            "pairs": [{"theta": [0], "image": [0]}, {"theta": [1], "image": [1]}]}"#,
    );
    let measure = write(
        dir.path(),
        "rho.json",
        r#"{"dim": 1, "atoms": [{"point": [0], "weight": 0.3}, {"point": [1], "weight": 0.3},
                                {"point": [2], "weight": 0.4}]}"#,
    );
    let run = pushmatch(&["solve", "--map", &map, "--measure", &measure, "--objective", "kl"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let record: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let objective = record["objective"].as_f64().unwrap();
    assert!((objective - (1.0f64 / 0.6).ln()).abs() < 1e-8);
    assert_eq!(record["status"], "converged");

    let run = pushmatch(&[
        "solve", "--map", &map, "--measure", &measure, "--objective", "wasserstein", "--p", "1",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert!((record["objective"].as_f64().unwrap() - 0.4).abs() < 1e-12);

    let run = pushmatch(&["solve", "--map", &map, "--measure", &measure, "--objective", "tv"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn tampered_report_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL);
    let json = out_path(dir.path(), "report.json");
    assert_eq!(pushmatch(&["verify", "--config", &cfg, "--out", &json]).status.code(), Some(0));

    let text = fs::read_to_string(&json).unwrap();
    let tampered = text.replacen("\"status\": \"converged\"", "\"status\": \"max_iters\"", 1);
    assert_ne!(text, tampered);
    fs::write(&json, tampered).unwrap();
    let run = pushmatch(&["report", &json, "--format", "csv"]);
    assert_eq!(run.status.code(), Some(1));
}
