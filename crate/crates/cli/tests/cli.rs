use std::path::Path;
use std::process::{Command, Output};

fn ibsaea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ibsaea")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_analyze_export() {
    let tmp = tempfile::tempdir().unwrap();
    let runs = tmp.path().join("runs");
    let config = tmp.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"frameworks": ["ucb", "rs", "vesaea"], "problems": [{"benchmark": "sphere", "dimension": 2}], "trials": 3}"#,
    )
    .unwrap();

    let out = ibsaea(&["run", "--config", path(&config), "--problems", "sphere,griewank", "--seed", "4", "--out", path(&runs)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let results = std::fs::read_to_string(runs.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 3 * 2 * 3);

    let report = tmp.path().join("report");
    let out = ibsaea(&["analyze", "--in", path(&runs), "--control", "ucb", "--alpha", "0.05", "--out", path(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Average ranking"));
    assert!(report.join("risk.csv").is_file());

    let out = ibsaea(&["export", "--in", path(&runs), "--what", "convergence", "--key", "rs:griewank:2:5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("evaluation_count,best_so_far\n"));

    let sel = tmp.path().join("sel.csv");
    let out = ibsaea(&["export", "--in", path(&runs), "--what", "selections", "--key", "ucb:sphere:2", "--out", path(&sel)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&sel).unwrap().starts_with("seed,generation,constituent,reward\n"));

    let out = ibsaea(&["export", "--in", path(&runs), "--what", "selections", "--key", "vesaea:sphere:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bandit_sim_writes_trials() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ibsaea(&[
        "bandit-sim", "--means", "0.2,0.8", "--horizon", "200", "--policy", "eg:0.1", "--trials", "2", "--out", path(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trial_0.csv", "trial_1.csv", "summary.csv"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    let steps = std::fs::read_to_string(tmp.path().join("trial_0.csv")).unwrap();
    assert_eq!(steps.lines().count(), 201);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(ibsaea(&[]).status.code(), Some(1));
    assert_eq!(ibsaea(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ibsaea(&["run", "--frameworks", "nope", "--out", "x"]).status.code(), Some(1));
    assert_eq!(ibsaea(&["analyze", "--in", "x", "--alpha", "abc"]).status.code(), Some(1));
    assert_eq!(ibsaea(&["export", "--in", "x", "--what", "everything", "--key", "a:b:1"]).status.code(), Some(1));
    assert_eq!(ibsaea(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_failures_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("absent");
    let out = ibsaea(&["analyze", "--in", path(&missing), "--control", "ucb"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"trials": 2, "colour": "blue"}"#).unwrap();
    assert_eq!(ibsaea(&["run", "--config", path(&bad), "--out", path(tmp.path())]).status.code(), Some(2));
    assert_eq!(ibsaea(&["run", "--trials", "1", "--dims", "2"]).status.code(), Some(2));
}
