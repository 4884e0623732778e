use std::path::Path;
use std::process::{Command, Output};

fn expsamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsamp"))
        .args(args)
        .env_remove("EXPSAMP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV artifact, header included.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn kernel_check_emits_moment_report() {
    let out = expsamp(&["kernel-check", "--kernel", "bspline3", "--mu", "5", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let report = &json["report"];
    assert_eq!(report["kernel_name"], "bspline3");
    assert_eq!(report["absolute_moments"][0]["value"], 0.75);
    assert!((report["eta"].as_f64().unwrap() - 0.125).abs() < 1e-6);
    assert_eq!(report["chi1_holds"], true);
    assert_eq!(json["config"]["command"], "kernel-check");
}

#[test]
fn kernel_check_without_positive_eta_is_hypothesis_not_met() {
    let out = expsamp(&["kernel-check", "--kernel", "bspline2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn converge_errors_decrease() {
    let out = expsamp(&[
        "converge", "--function", "weight", "--kernel", "bspline3", "--w", "4,8,16,32,64", "--interval", "0.5,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# config: {"));
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["w", "sup_abs_error", "weighted_sup_error", "failed_points"]);
    let errors: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(errors.len(), 5);
    assert!(errors.windows(2).all(|p| p[1] < p[0]), "{errors:?}");
}

#[test]
fn reconstruct_writes_one_row_per_grid_point() {
    let out = expsamp(&[
        "reconstruct", "--function", "log", "--kernel", "bspline2", "--op", "S", "--w", "8", "--grid", "-1:1:101",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["x", "log_x", "value", "error_vs_f", "weighted_error"]);
    assert_eq!(rows.len(), 102);
    // S_w with the hat kernel interpolates log x exactly
    for row in &rows[1..] {
        let err: f64 = row[3].parse().unwrap();
        assert!(err < 1e-12);
        assert_eq!(row[1].split('e').next().unwrap().len(), 18 + row[1].starts_with('-') as usize);
    }
}

#[test]
fn list_includes_builtins() {
    let out = expsamp(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in ["bspline2", "bspline3", "gauss1", "linc0", "weight", "psi"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(name)), "{name} missing");
    }
}

#[test]
fn empty_registry_keeps_builtins_and_aliases_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    let plain = stdout(&expsamp(&["list"]));
    let out = expsamp(&["list", "--registry", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), plain);

    let aliases = dir.path().join("aliases.json");
    std::fs::write(&aliases, r#"{"kernels": {"smooth": "bspline3"}, "functions": {"bump": "tent"}}"#).unwrap();
    let text = stdout(&expsamp(&["list", "--registry", aliases.to_str().unwrap()]));
    assert!(text.contains("smooth") && text.contains("alias for tent"));
    let out = expsamp(&[
        "converge", "--registry", aliases.to_str().unwrap(), "--kernel", "smooth", "--function", "bump",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn identical_configs_give_identical_bytes() {
    for args in [
        &["converge", "--function", "damped-sin-log", "--format", "json"][..],
        &["reconstruct", "--op", "I", "--function", "tent", "--grid", "-1:1:33"][..],
        &["rate", "--functions", "weight,tent", "--format", "md"][..],
    ] {
        let a = expsamp(args);
        let b = expsamp(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(expsamp(&["reconstruct", "--kernel", "nope"]).status.code(), Some(2));
    assert_eq!(expsamp(&["reconstruct", "--function", "nope"]).status.code(), Some(2));
    assert_eq!(expsamp(&["reconstruct", "--grid", "1:0:10"]).status.code(), Some(2));
    assert_eq!(expsamp(&["reconstruct", "--grid", "a:b"]).status.code(), Some(2));
    assert_eq!(expsamp(&["converge", "--w", "0,4"]).status.code(), Some(2));
    assert_eq!(expsamp(&["converge", "--interval", "2,1"]).status.code(), Some(2));
    assert_eq!(expsamp(&["frobnicate"]).status.code(), Some(2));
    let blocker = tempfile::NamedTempFile::new().unwrap();
    let unwritable = blocker.path().join("x.csv");
    assert_eq!(
        expsamp(&["reconstruct", "--out", unwritable.to_str().unwrap()]).status.code(),
        Some(2)
    );
    // log is signed, outside the rate theorem's class
    assert_eq!(expsamp(&["rate", "--function", "log"]).status.code(), Some(3));
    assert_eq!(expsamp(&["voronovskaja", "--strict"]).status.code(), Some(3));
}

#[test]
fn summary_goes_to_stderr_when_artifact_is_on_stdout() {
    let out = expsamp(&["rate", "--function", "weight"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert!(summary.lines().all(|l| l.starts_with("consistent")));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_expsamp"))
        .args(["converge", "--w", "4,8,16"])
        .env("EXPSAMP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("converge-bspline3-weight.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv_rows(&text).len(), 4);
    assert!(stdout(&out).contains("wrote"));
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1, "temporary files left behind: {names:?}");

    let out = Command::new(env!("CARGO_BIN_EXE_expsamp"))
        .args(["kernel-check", "--out", "k.json"])
        .env("EXPSAMP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("k.json").exists());
}

fn embedded_config(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let line = text.lines().next().unwrap();
    serde_json::from_str(line.strip_prefix("# config: ").unwrap()).unwrap()
}

#[test]
fn rerun_from_saved_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let out = expsamp(&[
        "reconstruct", "--function", "damped-log2", "--op", "E", "--c", "0.5", "--w", "2", "--grid", "-1:1:21", "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let config = embedded_config(&first);
    assert_eq!(config["op"], "E");
    assert_eq!(config["c"], 0.5);

    let saved = dir.path().join("config.json");
    std::fs::write(&saved, serde_json::to_vec(&config).unwrap()).unwrap();
    let second = dir.path().join("second.csv");
    let out = expsamp(&["run", saved.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());

    // a JSON artifact is itself a valid config
    let json = dir.path().join("k.json");
    assert_eq!(expsamp(&["kernel-check", "--kernel", "gauss1", "--out", json.to_str().unwrap()]).status.code(), Some(0));
    let out = expsamp(&["run", json.to_str().unwrap()]);
    assert_eq!(out.stdout, std::fs::read(&json).unwrap());

    std::fs::write(&saved, r#"{"command": "converge", "colour": "red"}"#).unwrap();
    assert_eq!(expsamp(&["run", saved.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn markdown_suite_reports_totals() {
    let out = expsamp(&["suite", "--kernel", "gauss1", "--w", "4,16", "--format", "md"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# Verification suite for gauss1"));
    assert!(text.contains("| bound | verdict |"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let total = stderr.lines().last().unwrap();
    assert!(total.starts_with("total") && total.contains(" 0 violated"), "{total}");
}
