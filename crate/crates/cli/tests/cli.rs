use std::process::{Command, Output};

use serde_json::Value;

fn singtrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singtrace"))
        .args(args)
        .env("SINGTRACE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn record(args: &[&str]) -> Value {
    let out = singtrace(args);
    assert!(
        out.status.success(),
        "singtrace {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn harmonic_trace_is_near_one() {
    let r = record(&["trace", "--seq", "harmonic", "--psi", "log", "--horizon", "1e6"]);
    assert_eq!(r["command"], "trace");
    assert_eq!(r["horizon"], 1_000_000);
    let value = r["result"]["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() < 0.06, "value {value}");
    assert_eq!(r["result"]["verdict"], "measurable-consistent");
    assert_eq!(r["result"]["extension"]["verdict"], "finite");
}

#[test]
fn submajorization_of_a_sequence_by_itself_holds() {
    let r = record(&["submaj", "--b", "harmonic", "--a", "harmonic", "--n", "1000"]);
    assert_eq!(r["result"]["holds"], true);
    assert_eq!(r["result"]["min_slack"].as_f64().unwrap(), 0.0);
    assert!(r["result"]["first_violation"].is_null());
}

#[test]
fn linear_psi_fails_the_criterion() {
    let r = record(&["criterion", "--psi", "linear", "--horizon", "1e6"]);
    let value = r["result"]["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() < 1e-3, "value {value}");
    assert_eq!(r["result"]["pass"], false);

    let r = record(&["criterion", "--psi", "log", "--horizon", "1e6"]);
    assert_eq!(r["result"]["pass"], true);
}

#[test]
fn malformed_arguments_exit_with_2() {
    assert_eq!(singtrace(&["trace", "--seq", "nonsense"]).status.code(), Some(2));
    assert_eq!(singtrace(&["trace", "--seq", "harmonic", "--horizon", "1.5"]).status.code(), Some(2));
    assert_eq!(
        singtrace(&["trace", "--seq", "harmonic", "--limit", "dilavg:5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        singtrace(&["norm", "--seq", "file:/nonexistent/values.csv"]).status.code(),
        Some(2)
    );
}

#[test]
fn failed_precondition_exits_with_3() {
    let out = singtrace(&[
        "decompose", "--b", "constant:3", "--a1", "constant:1", "--a2", "constant:1", "--n", "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("submajorization fails"));
}

#[test]
fn violated_submajorization_is_a_result_not_an_error() {
    let r = record(&["submaj", "--b", "constant:2", "--a", "harmonic", "--n", "10"]);
    assert_eq!(r["result"]["holds"], false);
    assert_eq!(r["result"]["first_violation"], 0);
}

#[test]
fn decomposition_certificate_is_verified() {
    let r = record(&[
        "decompose", "--b", "harmonic", "--a1", "power:1.5", "--a2", "power:0.9", "--n", "200",
    ]);
    assert_eq!(r["result"]["report1"]["holds"], true);
    assert_eq!(r["result"]["report2"]["holds"], true);
    let b1 = r["result"]["b1"].as_array().unwrap();
    let b2 = r["result"]["b2"].as_array().unwrap();
    for (k, (x, y)) in b1.iter().zip(b2).enumerate() {
        let sum = x.as_f64().unwrap() + y.as_f64().unwrap();
        assert!((sum - 1.0 / (k as f64 + 1.0)).abs() < 1e-12);
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["measurability", "--seq", "oscillating", "--horizon", "2e5"];
    let first = singtrace(&args);
    let second = Command::new(env!("CARGO_BIN_EXE_singtrace"))
        .args(args)
        .env("SINGTRACE_THREADS", "1")
        .output()
        .unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn curve_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let r = record(&[
        "norm",
        "--seq",
        "harmonic",
        "--horizon",
        "1e5",
        "--curve",
        path.to_str().unwrap(),
        "--curve-points",
        "50",
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,value"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (i, v) = l.split_once(',').unwrap();
            (i.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert!(rows.len() <= 51 && rows.len() > 10);
    assert_eq!(rows[0].0, 0);
    assert_eq!(rows.last().unwrap().0, 99_999);
    // the curve is T(harmonic), whose maximum is the reported norm
    let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    assert_eq!(max, r["result"]["value"].as_f64().unwrap());
}

#[test]
fn matrix_input_gives_singular_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(&path, "0,3\n4,0\n").unwrap();
    let spec = format!("file:{}", path.display());
    let r = record(&["mu", "--matrix", &spec]);
    let s: Vec<f64> = r["result"]["singular_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
}

#[test]
fn file_sequences_are_rearranged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    std::fs::write(&path, "# unsorted\n1\n5\n3\n").unwrap();
    let spec = format!("file:{}", path.display());
    let r = record(&["mu", "--seq", &spec, "--n", "5"]);
    let values: Vec<f64> = r["result"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(values, vec![5.0, 3.0, 1.0, 0.0, 0.0]);
}

#[test]
fn dpss_doubling_ratio_keeps_oscillating() {
    let r = record(&["psi-diagnose", "--psi", "dpss", "--horizon", "1e7"]);
    let lo = r["result"]["liminf_estimate"].as_f64().unwrap();
    let hi = r["result"]["limsup_estimate"].as_f64().unwrap();
    assert!(lo < 1.02, "liminf estimate {lo}");
    assert!(hi > 1.5, "limsup estimate {hi}");
}
