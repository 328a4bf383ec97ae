//! End-to-end checks of the command-line binary: exit codes, JSON reports,
//! CSV artifacts, and byte-stable determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zrfluid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_reports_the_model() {
    let out = run(&["validate", fixture("example_w.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], Value::Bool(true));
    assert_eq!(v["sites"], 3);
    assert_eq!(v["labels"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(v["stationary"], serde_json::json!([0.25, 0.5, 0.25]));
    assert_eq!(v["max_rate"], 2.0);
}

#[test]
fn validate_rejects_bad_documents() {
    let out = run(&["validate", fixture("bad_diagonal.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("diagonal") && err.contains('a'), "stderr: {err}");

    let out = run(&["validate", fixture("disconnected.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains('c') && err.contains('d'), "no witness partition: {err}");

    let out = run(&["validate", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"sites\": [,]}").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "no location: {}", stderr(&out));
}

#[test]
fn trace_reports_watched_rates_and_flows() {
    let out = run(&[
        "trace",
        fixture("example_w.json").to_str().unwrap(),
        "--subset",
        "a,b",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["subset"], serde_json::json!(["a", "b"]));
    assert_eq!(v["trace_rates"], serde_json::json!([[0.0, 2.0], [1.0, 0.0]]));
    assert_eq!(v["net_flow"], serde_json::json!([-1.0, 1.0]));
    assert!(v["implementation_gap"].as_f64().unwrap() <= 1e-12);

    let out = run(&[
        "trace",
        fixture("example_w.json").to_str().unwrap(),
        "--subset",
        "a,z",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains('z'));
}

#[test]
fn absorb_reports_minimal_set_and_bottlenecks() {
    let out = run(&[
        "absorb",
        fixture("example_w.json").to_str().unwrap(),
        "--subset",
        "a",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["support"], serde_json::json!(["a"]));
    assert_eq!(v["support_is_absorbing"], Value::Bool(false));
    assert_eq!(v["minimal_absorbing"], serde_json::json!(["a", "b"]));
    assert_eq!(v["bottlenecks"], serde_json::json!(["b"]));
    let peeling = v["peeling"].as_array().unwrap();
    assert_eq!(peeling.len(), 2);
    assert_eq!(peeling[0]["removed"], serde_json::json!(["c"]));
    assert_eq!(peeling[0]["net_flow"], serde_json::json!([-1.0, 2.0, -1.0]));

    let out = run(&[
        "absorb",
        fixture("example_w.json").to_str().unwrap(),
        "--subset",
        "b",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["support_is_absorbing"], Value::Bool(true));
    assert_eq!(v["minimal_absorbing"], serde_json::json!(["b"]));
}

#[test]
fn fluid_emits_breakpoints_regulator_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let model = fixture("example_w.json");
    let args = [
        "fluid",
        model.to_str().unwrap(),
        "--start",
        "1,0,0",
        "--regulator",
        "--grid",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["breakpoint_times"], serde_json::json!([0.0, 1.0]));
    assert_eq!(v["terminal"], serde_json::json!([0.0, 1.0, 0.0]));
    assert_eq!(v["drain_time"], 1.0);
    assert_eq!(v["orp"]["passed"], Value::Bool(true));
    assert_eq!(
        v["regulator"]["slopes"],
        serde_json::json!([[0.0, 0.0, 1.0], [1.0, 0.0, 1.0]])
    );

    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 13, "comment + header + 11 grid rows");
    assert_eq!(lines[0], "# tol = 1.00000000000e-9");
    assert_eq!(lines[1], "t,a,b,c,rho_a,rho_b,rho_c");

    // Byte-stable across runs.
    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
    assert_eq!(
        csv,
        std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap()
    );

    let out = run(&[
        "fluid",
        fixture("example_w.json").to_str().unwrap(),
        "--start",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_runs_gates_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let experiment = fixture("small_experiment.json");
    let args = [
        "simulate",
        experiment.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["medians_nonincreasing"], Value::Bool(true));
    assert_eq!(v["threshold_met"], Value::Bool(true));
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 8, "header + trials for both sizes");
    assert_eq!(lines[0], "n,trial,sup_distance");

    let again = run(&args);
    assert_eq!(out.stdout, again.stdout, "simulate is not byte-stable");

    // A different master seed changes the draw.
    let reseeded = run(&[
        "simulate",
        fixture("small_experiment.json").to_str().unwrap(),
        "--seed",
        "31337",
    ]);
    assert_eq!(reseeded.status.code(), Some(0));
    assert_ne!(out.stdout, reseeded.stdout);
}

#[test]
fn simulate_fails_an_impossible_bar() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "model": {
            "sites": ["a", "b", "c"],
            "rates": [[0.0, 2.0, 0.0], [1.0, 0.0, 1.0], [0.0, 2.0, 0.0]]
        },
        "start": [1.0, 0.0, 0.0],
        "n_list": [20, 50],
        "t_max": 1.0,
        "trials": 6,
        "seed": 5,
        "max_median_final": 1e-4
    });
    let path = dir.path().join("impossible.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
    let out = run(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("exceeds the bar"));
}
