use std::process::{Command, Output};

use serde_json::Value;

use qfc_core::spec::parse_state_spec;

fn qfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfc")).args(args).output().expect("qfc runs")
}

fn json_run(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = qfc(&all);
    let code = out.status.code().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (value, code)
}

const BELL: &str = r#"{"kind":"max_entangled","dims":[2,2]}"#;

#[test]
fn bell_q_ah_is_one_half() {
    let (report, code) = json_run(&["qah", "--state-json", BELL]);
    assert_eq!(code, 0);
    let v = report["results"]["q_ah"].as_f64().unwrap();
    assert!((v - 0.5).abs() <= 1e-4, "{v}");
    assert_eq!(report["command"], "qah");
    assert_eq!(report["tool"], "qfc");
    assert!(report["optimizer"][0]["restart_values"].as_array().unwrap().len() == 16);
}

#[test]
fn classical_state_q_api_vanishes() {
    let spec = r#"{"kind":"cc","probs":[0.3,0.7],"dims":[2,3]}"#;
    let (report, code) = json_run(&["qapi", "--state-json", spec]);
    assert_eq!(code, 0);
    assert!(report["results"]["q_api"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn schmidt_sweep_matches_closed_form_per_row() {
    let spec = r#"{"kind":"pure_schmidt","coeffs":[1.0],"dims":[2,2]}"#;
    let out = qfc(&["sweep", "--state-json", spec, "--param", "s", "--from", "0.5", "--to", "1.0", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    for (k, row) in rows.iter().enumerate() {
        let s: f64 = row[col("value")].parse().unwrap();
        assert!((s - (0.5 + 0.1 * k as f64)).abs() <= 1e-12);
        let expected = 1.0 - s * s - (1.0 - s) * (1.0 - s);
        for q in ["q_ah", "q_api", "d_g"] {
            let v: f64 = row[col(q)].parse().unwrap();
            assert!((v - expected).abs() <= 1e-4, "row {k} {q}: {v} vs {expected}");
        }
        assert_eq!(&row[col("seed")], k.to_string().as_str());
    }
}

#[test]
fn sweep_over_explicit_values_and_noise() {
    let out = qfc(&["sweep", "--state-json", BELL, "--param", "noise", "--values", "0,0.5,1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = report["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let q: Vec<f64> = rows.iter().map(|r| r["q_ah"].as_f64().unwrap()).collect();
    assert!(q[0] > q[1] && q[1] > q[2]);
    assert!(q[2].abs() <= 1e-9);
}

#[test]
fn schema_errors_name_the_path_and_exit_2() {
    let out = qfc(&["qah", "--state-json", r#"{"kind":"pure_schmidt","coeffs":[0.8,0.2],"dims":[2,"x"]}"#]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("dims"), "{err}");
    let out = qfc(&["qah", "--state-json", r#"{"kind":"max_entangled","dims":[2,2],"extra":true}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn physics_errors_exit_1() {
    let out = qfc(&["qah", "--state-json", r#"{"kind":"pure_schmidt","coeffs":[0.8,0.3],"dims":[2,2]}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sum"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qfc(&["qah"]).status.code(), Some(2));
    assert_eq!(qfc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qfc(&["qah", "--state-json", BELL, "--restarts", "0"]).status.code(), Some(2));
    assert_eq!(qfc(&["verify", "--criterion", "12"]).status.code(), Some(2));
}

#[test]
fn dimension_guard() {
    let big = r#"{"kind":"random","dims":[7,6],"seed":1}"#;
    let obs = r#"{"kind":"pauli","axis":"z","party":"joint"}"#;
    assert_eq!(qfc(&["qfi", "--state-json", big, "--observable", obs]).status.code(), Some(2));
    let diag = r#"{"kind":"diag","values":[1,2,3,4,5,6],"party":"b"}"#;
    let out = qfc(&["qfi", "--state-json", big, "--observable", diag, "--allow-large"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn qfi_reports_bounds_and_residual() {
    let obs = r#"{"kind":"pauli","axis":"x","party":"b"}"#;
    let (report, code) = json_run(&["qfi", "--state-json", r#"{"kind":"werner","w":0.5}"#, "--observable", obs]);
    assert_eq!(code, 0);
    let r = &report["results"];
    let (f, v) = (r["qfi"].as_f64().unwrap(), r["variance"].as_f64().unwrap());
    assert!(f >= 0.0 && f <= v + 1e-10);
    assert!(r["sld_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(report["observable"]["axis"], "x");
}

#[test]
fn report_echo_reparses_to_the_same_spec() {
    let input = r#"{"kind":"cc","probs":[0.25,0.75],"dims":[2,3],"noise":0.1}"#;
    let (report, _) = json_run(&["qapi", "--state-json", input]);
    let echoed = parse_state_spec(&report["spec"].to_string()).unwrap();
    assert_eq!(echoed, parse_state_spec(input).unwrap());
}

#[test]
fn identical_invocations_reproduce_output() {
    let args = ["qah", "--state-json", r#"{"kind":"random","dims":[2,3],"seed":4,"rank":3}"#, "--seed", "9"];
    let a = qfc(&args);
    let b = qfc(&args);
    assert_eq!(a.stdout, b.stdout);
    let (mut ja, _) = json_run(&args);
    let (mut jb, _) = json_run(&args);
    ja["wall_time_s"] = Value::Null;
    jb["wall_time_s"] = Value::Null;
    assert_eq!(ja, jb);
}

#[test]
fn iteration_cap_is_reported_as_failure() {
    let spec = r#"{"kind":"random","dims":[3,3],"seed":2}"#;
    let (report, code) = json_run(&["qah", "--state-json", spec, "--max-iterations", "3", "--restarts", "2"]);
    assert_eq!(code, 1);
    assert_eq!(report["results"]["converged"], false);
    assert!(report["results"]["q_ah"].as_f64().unwrap() > 0.0);
}

#[test]
fn discord_in_bits() {
    let (report, code) = json_run(&["discord", "--state-json", BELL, "--log-base", "2"]);
    assert_eq!(code, 0);
    assert!((report["results"]["d_q"].as_f64().unwrap() - 1.0).abs() <= 1e-4);
    assert!((report["results"]["d_g"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    assert_eq!(report["results"]["d_g_method"], "closed_form");
}

#[test]
fn state_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    std::fs::write(&path, BELL).unwrap();
    let out = qfc(&["qapi", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("q_api"));
}

#[test]
fn verify_subset_passes() {
    let out = qfc(&["verify", "--criterion", "2", "--criterion", "4", "--criterion", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("[PASS]").count(), 3, "{text}");
    assert!(text.contains("3/3 criteria passed"));
}
