use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadamard")).args(args).output().expect("spawn hadamard")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(out)))
}

const ROW1: [&str; 8] = ["--builtin", "power_s", "--s", "0.5", "--a", "0.89", "--b", "0.9"];

#[test]
fn eval_paper_compat_reports_t1() {
    let mut args = vec!["eval", "--mode", "paper_compat", "--format", "json"];
    args.extend(ROW1);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let t1 = v["rhs_by_theorem"]["t1"].as_f64().unwrap();
    assert!((t1 / 2.570313847e-3 - 1.0).abs() < 1e-6);
    assert_eq!(v["regime"], "above_unit");
}

#[test]
fn eval_strict_rejects_above_unit() {
    let mut args = vec!["eval"];
    args.extend(ROW1);
    let out = run(&args);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("rejected (range_unit_interval)"));
}

#[test]
fn eval_without_function_is_input_error() {
    let out = run(&["eval", "--s", "0.5", "--a", "0.1", "--b", "0.2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no function"));
}

#[test]
fn eval_rejects_reversed_interval() {
    let out = run(&["eval", "--builtin", "power_s", "--s", "0.5", "--a", "0.9", "--b", "0.1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors_exit_3_and_help_exits_0() {
    assert_eq!(code(&run(&["bogus"])), 3);
    assert_eq!(code(&run(&["eval", "--s", "abc"])), 3);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn reproduce_flags_the_third_row() {
    let out = run(&["reproduce", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["pass"], true);
    assert_eq!(rows[1]["pass"], true);
    assert_eq!(rows[2]["pass"], false);
    assert_eq!(v["all_within"], false);
}

#[test]
fn reproduce_perturbation_is_detected() {
    let out = run(&["reproduce", "--perturb", "1e-3", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["pass"] == false));
}

#[test]
fn reproduce_text_lists_prop3_comparison() {
    let out = run(&["reproduce", "--prop3-as-printed"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("MISMATCH"));
}

#[test]
fn certify_example_power_family_passes() {
    for prop in ["monotone", "sconvex"] {
        let out = run(&[
            "certify", "--builtin", "power_s", "--s", "0.5", "--a", "0.2", "--b", "0.9", "--property", prop, "--q", "2",
            "--format", "json",
        ]);
        assert_eq!(code(&out), 0, "{prop}: {}", stdout(&out));
        assert_eq!(json(&out)["verdict"], "pass");
    }
}

#[test]
fn certify_failure_exits_2_with_counterexample() {
    let out = run(&[
        "certify", "--fprime", "x", "--s", "0.5", "--a", "0.2", "--b", "0.9", "--property", "monotone", "--format", "json",
    ]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["verdict"], "fail");
    assert!(v["counterexample"]["point"].is_array());
}

#[test]
fn tune_unit_mu_is_boundary_flagged() {
    let out = run(&[
        "tune", "--theorem", "t4", "--fa", "1", "--fb", "1", "--s", "0.5", "--a", "0.2", "--b", "0.6", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["best_params"], serde_json::json!([0.999, 0.999]));
    assert_eq!(v["at_boundary"], serde_json::json!([true, true]));
}

#[test]
fn tune_without_theorem_ranks_all_four() {
    let mut args = vec!["tune", "--format", "csv"];
    args.extend(ROW1);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let bounds: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(bounds.len(), 4);
    assert!(bounds.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn verify_csv_round_trips_and_matches_json() {
    let base = ["verify", "--samples", "20", "--family", "unscaled", "--mode", "paper_compat", "--seed", "7"];
    let csv_out = run(&[&base[..], &["--format", "csv"]].concat());
    let json_out = run(&[&base[..], &["--format", "json"]].concat());
    assert_eq!(code(&csv_out), 0);
    assert_eq!(code(&json_out), 0);
    let v = json(&json_out);
    let rows = v["rows"].as_array().unwrap();
    let mut rdr = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    let records: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 20);
    for (rec, row) in records.iter().zip(rows) {
        for (name, field) in header.iter().zip(rec.iter()) {
            match &row[name] {
                Value::Number(n) => assert_eq!(field.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{name}"),
                Value::String(s) => assert_eq!(field, s),
                Value::Null => assert_eq!(field, ""),
                other => panic!("{name}: {other}"),
            }
        }
    }
}

#[test]
fn verify_is_seed_deterministic() {
    let args = ["verify", "--samples", "10", "--seed", "3", "--format", "csv"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn verify_admissible_strict_exits_0() {
    let out = run(&["verify", "--samples", "30", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["violations"], 0);
}

#[test]
fn verify_zero_samples_is_input_error() {
    assert_eq!(code(&run(&["verify", "--samples", "0"])), 3);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"builtin": "power_s", "s": 0.5, "a": 0.89, "b": 0.9, "mode": "paper_compat", "format": "json"}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = run(&["eval", "--config", cfg]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["mode"], "paper_compat");
    let out = run(&["eval", "--config", cfg, "--mode", "strict"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["mode"], "strict");
}

#[test]
fn config_with_unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"builtin": "power_s", "colour": "blue"}"#).unwrap();
    let out = run(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut args = vec!["eval", "--mode", "paper_compat", "--format", "json", "--out", path.to_str().unwrap()];
    args.extend(ROW1);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["rhs_by_theorem"]["t1"].is_number());
}

#[test]
fn out_to_missing_directory_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nope").join("r.json");
    let out = run(&["reproduce", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}
