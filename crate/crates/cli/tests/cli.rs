use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use tempfile::NamedTempFile;

fn opmeans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opmeans")).args(args).env_remove("OPMEANS_MAX_DIM").output().unwrap()
}

fn problem_file(value: &Value) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    write!(f, "{}", serde_json::to_string_pretty(value).unwrap()).unwrap();
    f
}

fn compute(value: &Value, extra: &[&str]) -> (i32, Value) {
    let f = problem_file(value);
    let mut args = vec!["compute", f.path().to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = opmeans(&args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

fn solution(v: &Value) -> Vec<f64> {
    serde_json::from_value(v["solution"].clone()).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

const A: [f64; 9] = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];

#[test]
fn single_matrix_is_returned() {
    let (code, out) = compute(
        &json!({"dim": 3, "matrices": [A], "weights": [1.0], "generator": {"name": "power-convex", "p": 0.5}}),
        &[],
    );
    assert_eq!(code, 0);
    assert!(out["iterations"].as_u64().unwrap() <= 1);
    assert!(close(&solution(&out), &A, 1e-12));
    assert_eq!(out["converged"], true);
    assert_eq!(out["termination"], "gradient-tol");
}

#[test]
fn identical_matrices_are_returned() {
    for g in [
        json!({"name": "karcher"}),
        json!({"name": "shifted-log", "lambda": 2.0}),
        json!({"name": "power-concave", "p": 2}),
    ] {
        let (code, out) =
            compute(&json!({"dim": 3, "matrices": [A, A, A], "weights": [0.2, 0.3, 0.5], "generator": g}), &[]);
        assert_eq!(code, 0);
        assert!(close(&solution(&out), &A, 1e-10), "{out}");
    }
}

#[test]
fn karcher_of_diagonal_inputs() {
    let (code, out) = compute(
        &json!({"dim": 2, "matrices": [[4, 0, 0, 1], [1, 0, 0, 9]], "weights": [0.25, 0.75], "generator": {"name": "karcher"}}),
        &[],
    );
    assert_eq!(code, 0);
    // exp(¼ log 4) = √2, exp(¾ log 9) = 3√3
    let expected = [2f64.sqrt(), 0.0, 0.0, 3.0 * 3f64.sqrt()];
    assert!(close(&solution(&out), &expected, 1e-10), "{out}");
    assert_eq!(out["bounds_check"]["relation"], "below-arithmetic");
    assert_eq!(out["bounds_check"]["holds"], true);
}

#[test]
fn solution_round_trips_as_single_matrix_problem() {
    let g = json!({"name": "power-concave", "p": 1.5});
    let (_, out) = compute(
        &json!({"dim": 3, "matrices": [A, [2, 0, 0, 0, 1, 0, 0, 0, 5]], "weights": [0.6, 0.4], "generator": g}),
        &[],
    );
    let x = solution(&out);
    let (code, again) = compute(&json!({"dim": 3, "matrices": [x], "weights": [1.0], "generator": g}), &[]);
    assert_eq!(code, 0);
    assert_eq!(solution(&again), x);
}

#[test]
fn non_convergence_exits_2_with_json() {
    let (code, out) = compute(
        &json!({"dim": 3, "matrices": [A, [9, 0, 0, 0, 1, 0, 0, 0, 0.1], [1, 0, 0, 0, 2, 0, 0, 0, 3]],
            "weights": [0.2, 0.3, 0.5], "generator": {"name": "power-concave", "p": 2}}),
        &["--max-iters", "1", "--tol", "1e-14"],
    );
    assert_eq!(code, 2);
    assert_eq!(out["converged"], false);
    assert_eq!(out["termination"], "max-iters");
}

#[test]
fn file_overrides_and_flags() {
    let base = json!({"dim": 3, "matrices": [A, [9, 0, 0, 0, 1, 0, 0, 0, 0.1], [1, 0, 0, 0, 2, 0, 0, 0, 3]],
        "weights": [0.2, 0.3, 0.5], "generator": {"name": "power-concave", "p": 2}, "max_iters": 1, "grad_tol": 1e-14});
    assert_eq!(compute(&base, &[]).0, 2);
    // Flags take precedence over the file.
    let (code, out) = compute(&base, &["--max-iters", "500", "--tol", "1e-10", "--init", "log-euclidean"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn input_errors_exit_1() {
    let f =
        problem_file(&json!({"dim": 2, "matrices": [[1, 0, 0, 1]], "weights": [1.0], "generator": {"name": "nope"}}));
    let out = opmeans(&["compute", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown generator"));

    let mut f = NamedTempFile::new().unwrap();
    write!(f, "{{\n  \"dim\": 2,\n  \"matrices\": [[1, 0, 0, 1]],\n  \"weights\": [1.0],\n  \"generatr\": {{}}\n}}")
        .unwrap();
    let out = opmeans(&["compute", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("line 5") && err.contains("generatr"), "{err}");

    assert_eq!(opmeans(&["compute", "/nonexistent/problem.json"]).status.code(), Some(1));
    assert_eq!(opmeans(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(opmeans(&["--help"]).status.code(), Some(0));
}

#[test]
fn stdin_and_dimension_cap() {
    let text = json!({"dim": 3, "matrices": [A], "weights": [1.0], "generator": {"name": "karcher"}}).to_string();
    let run = |cap: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_opmeans"));
        cmd.args(["compute", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
        match cap {
            Some(c) => cmd.env("OPMEANS_MAX_DIM", c),
            None => cmd.env_remove("OPMEANS_MAX_DIM"),
        };
        let mut child = cmd.spawn().unwrap();
        // The process may exit before reading its input.
        let _ = child.stdin.take().unwrap().write_all(text.as_bytes());
        child.wait_with_output().unwrap()
    };
    assert_eq!(run(None).status.code(), Some(0));
    let capped = run(Some("2"));
    assert_eq!(capped.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("cap of 2"));
    assert_eq!(run(Some("3")).status.code(), Some(0));
    assert_eq!(run(Some("zero")).status.code(), Some(1));
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn phi_table_spot_rows() {
    let out = opmeans(&["phi-table", "--generator", "power-concave", "--p", "2", "--t", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["t", "phi_numeric", "phi_closed_form", "abs_gap"]);
    assert_eq!(rows[0][..2], [1.0, 1.0]);
    assert_eq!(rows[1][0], 4.0);
    assert!((rows[1][1] - 2.915476).abs() < 1e-6);
    assert!(rows[1][3] <= 1e-10);
}

#[test]
fn phi_table_power_convex_is_monotone() {
    let out = opmeans(&[
        "phi-table",
        "--generator",
        "power-convex",
        "--p",
        "0.5",
        "--t-min",
        "0.1",
        "--t-max",
        "10",
        "--steps",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 101);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    assert!(rows.iter().all(|r| r[3] <= 1e-10));
    let one = rows.iter().find(|r| r[0] == 1.0).unwrap();
    assert_eq!(one[1], 1.0);
}

#[test]
fn phi_table_without_closed_form() {
    let out = opmeans(&["phi-table", "--generator", "shifted-log", "--lambda", "1", "--t", "0.5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["t", "phi_numeric"]);
    assert_eq!(rows.len(), 2);
    assert!(!out.stderr.is_empty());
    let out = opmeans(&["phi-table", "--generator", "power-concave", "--p", "2", "--weight", "0.3", "--t", "2"]);
    assert_eq!(csv_rows(&out).0, ["t", "phi_numeric"]);
    assert_eq!(opmeans(&["phi-table", "--generator", "karcher", "--t-min", "0"]).status.code(), Some(1));
}

#[test]
fn verify_vacuous_and_unknown() {
    let out = opmeans(&["verify", "majorization", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["reports"][0]["samples"], 0);
    assert_eq!(report["reports"][0]["violations"], 0);

    let out = opmeans(&["verify", "everything"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_all_passes_and_is_deterministic() {
    let run = || opmeans(&["verify", "all", "--seed", "42", "--samples", "200"]);
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["suite"], "all");
    let reports = report["reports"].as_array().unwrap();
    for r in reports.iter().filter(|r| r["kind"] == "theorem") {
        assert_eq!(r["violations"], 0, "{r}");
    }
    assert!(reports.iter().any(|r| r["kind"] == "probe"));
    assert!(reports.iter().any(|r| r["kind"] == "search"));
}

#[test]
fn verify_seed_changes_samples() {
    let run = |seed: &str| opmeans(&["verify", "gradient", "--seed", seed, "--samples", "6"]).stdout;
    assert_ne!(run("1"), run("2"));
}
