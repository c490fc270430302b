//! End-to-end runs of the `qip` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn qip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qip")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

const DICKE4: &str = r#"{"type":"dicke","n":4,"e":2}"#;

/// Full-rank product state diag(0.7, 0.3) ⊗ diag(0.6, 0.4) as a raw matrix.
fn product_raw() -> String {
    let diag = [0.42, 0.28, 0.18, 0.12];
    let rows: Vec<String> = (0..4)
        .map(|i| {
            let cells: Vec<String> =
                (0..4).map(|j| format!("[{},0]", if i == j { diag[i] } else { 0.0 })).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!(r#"{{"type":"raw","matrix":[{}]}}"#, rows.join(","))
}

#[test]
fn project_dicke_multi_information() {
    let out = qip(&["project", "--state", DICKE4, "--k", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert!((f(&v["distance_bits"]) - 4.0).abs() < 1e-6);
    assert_eq!(v["k"], 1);
    assert_eq!(v["status"], "converged");
    assert_eq!(v["basis"]["size"], 12);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 12);
    assert!(f(&v["checks"]["product_check_bits"]) < 1e-6);
}

#[test]
fn project_noise_endpoint_is_zero() {
    let out = qip(&["project", "--state", r#"{"type":"mix","p":1,"base":{"type":"dicke","n":4,"e":2}}"#, "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(f(&json_of(&out)["distance_bits"]), 0.0);
}

#[test]
fn project_ghz_with_stabilizer_symmetry() {
    let out = qip(&[
        "project",
        "--state",
        r#"{"type":"ghz","n":3}"#,
        "--k",
        "2",
        "--symmetry",
        r#"{"pauli":["ZZI","IZZ","XXX"]}"#,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert_eq!(v["basis"]["size"], 3);
    assert_eq!(v["basis"]["reduced"], true);
    assert_eq!(v["basis"]["labels"], serde_json::json!(["IZZ", "ZIZ", "ZZI"]));
    assert_eq!(v["symmetry"]["group_order"], 8);
}

#[test]
fn project_both_methods_reports_discrepancy() {
    let state = r#"{"type":"mix","p":0.4,"base":{"type":"ghz","n":3}}"#;
    let out = qip(&["project", "--state", state, "--k", "1", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert!(v["runs"]["iterative"].is_object() && v["runs"]["dual"].is_object());
    assert!(f(&v["checks"]["discrepancy_bits"]) < 1e-6);
    assert!(f(&v["checks"]["trace_distance"]) < 1e-6);
}

#[test]
fn divergence_exits_three_with_best_iterate() {
    let out = qip(&["project", "--state", DICKE4, "--k", "2", "--max-sweeps", "2000", "--symmetry", "auto-permutation"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&out);
    assert_eq!(v["status"], "diverged");
    assert!(v["runs"]["iterative"]["divergent_term"].is_string());
    let d = f(&v["distance_bits"]);
    assert!(d.is_finite() && d >= 0.0);
    assert!(stderr(&out).contains("diverged"));
}

#[test]
fn spec_errors_exit_two() {
    for args in [
        vec!["project", "--state", "{not json", "--k", "1"],
        vec!["project", "--state", r#"{"type":"dicke","n":4,"e":7}"#, "--k", "1"],
        vec!["project", "--state", r#"{"type":"dicke","n":4,"e":2,"x":1}"#, "--k", "1"],
        vec!["project", "--state", DICKE4, "--k", "5"],
        vec!["project", "--state", DICKE4, "--k", "1", "--omega", "1.5"],
        vec!["project", "--state", DICKE4, "--k", "1", "--symmetry", r#"{"pauli":["XX"]}"#],
        vec!["project", "--state", "/nonexistent/state.json", "--k", "1"],
        vec!["sweep", "--state", DICKE4, "--p-stop", "2"],
    ] {
        let out = qip(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error: invalid input"), "{}", stderr(&out));
    }
}

#[test]
fn measures_examples() {
    let out = qip(&["measures", "--state", &product_raw()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert!(v["distances"].as_array().unwrap().iter().all(|d| f(d).abs() < 1e-8));
    assert!(v["interactions"].as_array().unwrap().iter().all(|c| f(&c["difference"]).abs() < 1e-8));

    let out = qip(&["measures", "--state", r#"{"type":"mix","p":1,"base":{"type":"ghz","n":3}}"#]);
    let v = json_of(&out);
    assert!(v["distances"].as_array().unwrap().iter().all(|d| f(d) == 0.0));

    let out = qip(&["measures", "--state", DICKE4, "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["n"], 4);
    assert_eq!(v["distances"].as_array().unwrap().len(), 4);
    assert_eq!(f(&v["distances"][3]), 0.0);
    let c3 = &v["interactions"][1];
    assert_eq!(c3["k"], 3);
    assert!(f(&c3["difference"]).abs() < 1e-6, "C3 = {}", c3["difference"]);
    assert!(v["interactions"][2]["relative_entropy"].is_null(), "pure state has no k = n relative-entropy form");
    assert_eq!(v["diagnostics"].as_array().unwrap().len(), 3);
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let state = r#"{"type":"ghz","n":3}"#;
    let run = |jobs: &str| {
        let out = qip(&["sweep", "--state", state, "--p-start", "0.2", "--p-stop", "1", "--p-count", "5", "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("3"));

    let text = String::from_utf8(one).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["p", "D1", "D2", "C2", "C3", "residual1", "residual2", "converged1", "converged2", "sweeps1", "sweeps2", "status"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ps, [0.2, 0.4, 0.6, 0.8, 1.0]);
    let last = rows.last().unwrap();
    assert!(last[1].parse::<f64>().unwrap() <= 1e-6 && last[2].parse::<f64>().unwrap() <= 1e-6);
    assert_eq!(&last[11], "ok");
    for r in &rows {
        let (d1, d2, c2): (f64, f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap());
        assert!((d1 - d2 - c2).abs() < 1e-9);
    }
}

#[test]
fn sweep_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = qip(&[
        "sweep", "--state", DICKE4, "--p-start", "0.5", "--p-stop", "1", "--p-count", "3", "--k", "2,3", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().take(5).collect::<Vec<_>>(), ["p", "D2", "D3", "C3", "C4"]);
    for r in reader.records() {
        let r = r.unwrap();
        let (d2, d3): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((d2 - d3).abs() <= 1e-4);
    }
}

#[test]
fn sweep_records_nonconvergence_in_row() {
    let out = qip(&["sweep", "--state", DICKE4, "--p-count", "1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with("not_converged(k=2)"), "{text}");
}

#[test]
fn validate_examples() {
    let out = qip(&["validate", "--state", DICKE4]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["valid"], true);

    let out = qip(&["validate", "--state", r#"{"type":"raw","matrix":[[[2,0],[0,0]],[[0,0],[0,0]]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("trace"));

    let out = qip(&["validate", "--state", r#"{"type":"raw","matrix":[[[1.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("positiv"), "{}", stderr(&out));

    let out = qip(&["validate", "--state", DICKE4, "--symmetry", r#"{"pauli":["ZIII"]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not invariant under generator ZIII"));

    let out = qip(&["validate", "--state", DICKE4, "--symmetry", r#"{"permutations":[[2,1,3,4]],"pauli":["XXXX"]}"#]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json_of(&out)["symmetry"]["group_order"], 4);
}

#[test]
fn auto_permutation_detection() {
    let out = qip(&["validate", "--state", DICKE4, "--symmetry", "auto-permutation"]);
    let v = json_of(&out);
    assert_eq!(v["permutation_symmetric"], true);
    assert_eq!(v["symmetry"]["group_order"], 24);

    let out = qip(&["validate", "--state", &product_raw(), "--symmetry", "auto-permutation"]);
    let v = json_of(&out);
    assert_eq!(v["permutation_symmetric"], false);
    assert_eq!(v["symmetry"]["group_order"], 1);
}

#[test]
fn state_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    std::fs::write(&path, r#"{"type":"ghz","n":3}"#).unwrap();
    let out = qip(&["project", "--state", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((f(&json_of(&out)["distance_bits"]) - 3.0).abs() < 1e-6);
}

#[test]
fn numbers_carry_at_most_twelve_significant_digits() {
    let out = qip(&["project", "--state", r#"{"type":"mix","p":0.3,"base":{"type":"ghz","n":3}}"#, "--k", "2"]);
    // Inspect the printed text: re-serialising parsed values could add digits.
    let text = String::from_utf8(out.stdout).unwrap();
    let thetas: Vec<&str> = text.lines().filter_map(|l| l.trim().strip_prefix("\"theta\": ")).collect();
    assert!(!thetas.is_empty());
    for s in thetas {
        let mantissa = s.trim_end_matches(',').trim_start_matches('-').split(['e', 'E']).next().unwrap();
        let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
        assert!(digits.trim_start_matches('0').len() <= 12, "{s}");
    }
}
