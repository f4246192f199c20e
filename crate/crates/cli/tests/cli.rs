use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcmod"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["mcmod"];
    full.extend_from_slice(args);
    let code = mcmod_cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

fn fixture(dir: &Path, name: &str, field: &str) -> (String, String) {
    let target = dir.join(name);
    let (code, _, err) = run(&["fixture", name, "--field", field, "--out-dir", target.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let s = |f: &str| target.join(f).to_str().unwrap().to_string();
    (s("algebra.json"), s("module.json"))
}

#[test]
fn mc_check_on_the_tautological_window() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "projective-line", "Q");
    let r = report(&["--no-timestamp", "mc-check", "--algebra", &a, "--module", &m]);
    assert_eq!(r["result"]["isModule"], true);
    assert_eq!(r["result"]["failures"], Value::Array(vec![]));
    assert_eq!(r["tool"], "mcmod");
    assert!(r["version"].is_string());
    assert_eq!(r["parameters"]["module"], Value::String(m));
}

#[test]
fn mc_check_reports_failing_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = fixture(dir.path(), "projective-line", "Q");
    let module = dir.path().join("bad.json");
    // x and y act by 1 on a line but the composite x·x acts by 0
    std::fs::write(
        &module,
        r#"{"window":[0,2],"dims":[1,1,1],"actions":[
            {"source":0,"target":1,"element":"x","matrix":[[1]]},
            {"source":1,"target":2,"element":"x","matrix":[[1]]}]}"#,
    )
    .unwrap();
    let r = report(&["--no-timestamp", "mc-check", "--algebra", &a, "--module", module.to_str().unwrap()]);
    assert_eq!(r["result"]["isModule"], false);
    let failures = r["result"]["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0]["elements"], serde_json::json!(["x", "x"]));
}

#[test]
fn stability_on_the_split_window() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "split", "Q");
    let r = report(&["--no-timestamp", "stability", "--algebra", &a, "--module", &m, "--character", "extremal", "--fields", "2,3"]);
    let res = &r["result"];
    assert_eq!(res["status"], "Unstable");
    assert_eq!(res["certificateLevel"], "ExactRational");
    assert_eq!(res["witnessTheta"], -1);
    assert!(res["witness"].is_object());
}

#[test]
fn stability_on_the_line_over_a_prime_field() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "projective-line", "Fp:3");
    let r = report(&["--no-timestamp", "stability", "--algebra", &a, "--module", &m]);
    assert_eq!(r["result"]["status"], "Stable");
    assert_eq!(r["result"]["mode"], "FiniteField");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "simple", "Fp:2");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(run(&["mc-check", "--algebra", bad, "--module", &m]).0, 2);
    assert_eq!(run(&["mc-check", "--algebra", &a, "--module", bad]).0, 2);
    assert_eq!(run(&["mc-check", "--algebra", &a, "--module", &m, "--frobnicate"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    // unknown descriptor fields are parse errors
    let extra = dir.path().join("extra.json");
    std::fs::write(&extra, r#"{"window":[0,1],"dims":[1,1],"colour":"red"}"#).unwrap();
    assert_eq!(run(&["mc-check", "--algebra", &a, "--module", extra.to_str().unwrap()]).0, 2);
    // domain errors
    let (code, _, err) = run(&["scan-mc", "--algebra", &a, "--window", "0,2", "--dims", "3,3,3", "--budget", "100"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    let (code, _, _) = run(&["stability", "--algebra", &a, "--module", &m, "--fields", "3"]);
    assert_eq!(code, 1);
    assert_eq!(run(&["hilbert", "macaulay", "--value", "4", "--t", "0"]).0, 1);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "split", "Fp:3");
    let args = ["--no-timestamp", "stability", "--algebra", &a, "--module", &m];
    let first = run(&args).1;
    let second = run(&args).1;
    assert_eq!(first, second);
    assert!(!first.contains("timestamp"));
    let stamped = report(&["stability", "--algebra", &a, "--module", &m]);
    assert!(stamped["timestamp"].is_u64());
}

#[test]
fn scan_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = fixture(dir.path(), "simple", "Fp:2");
    let r = report(&["scan-mc", "--algebra", &a, "--window", "0,2", "--dims", "1,1,1", "--orbits"]);
    let res = &r["result"];
    assert_eq!(res["points"], 1 << 7);
    assert_eq!(res["agree"], true);
    assert_eq!(res["mcPointsResidual"], res["mcPointsIdeal"]);
}

#[test]
fn thread_variable_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "projective-line", "Fp:2");
    let args = ["--no-timestamp", "stability", "--algebra", &a, "--module", &m];
    let one = bin().args(args).env("MC_MODULI_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("MC_MODULI_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = bin().args(args).env("MC_MODULI_THREADS", "lots").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_file_and_text_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("r.txt");
    let (code, stdout, _) = run(&["--text", "--output", out.to_str().unwrap(), "hilbert", "eval", "--coeffs", "1,1", "--at", "5"]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("value: 6"));
}

#[test]
fn ext_defaults_to_the_augmented_complex() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "simple", "Q");
    let r = report(&["ext", "--algebra", &a, "--module", &m]);
    assert_eq!(r["result"]["cohomology"], serde_json::json!([0, 1]));
    assert_eq!(r["result"]["dims"], serde_json::json!([1, 1]));
    let r = report(&["ext", "--plain", "--algebra", &a, "--module", &m]);
    assert_eq!(r["result"]["cohomology"], serde_json::json!([1, 1]));
}

#[test]
fn ideal_and_presentation_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = fixture(dir.path(), "simple", "Q");
    let r = report(&["ideal", "--algebra", &a, "--window", "0,2", "--dims", "1,1,1"]);
    // one quadratic equation per pair of degree-one elements
    assert_eq!(r["result"]["generators"].as_array().unwrap().len(), 4);
    let r = report(&["dg-verify", "--show", "--algebra", &a, "--window", "0,3", "--dims", "1,1,1,1"]);
    assert_eq!(r["result"]["qSquaredZero"], true);
    assert_eq!(r["result"]["degreesConsistent"], true);
    assert!(r["result"]["presentation"].is_array());
}

#[test]
fn pipeline_on_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let (a, m) = fixture(dir.path(), "projective-line", "Fp:2");
    let r = report(&["pipeline", "--algebra", &a, "--module", &m, "--p-prime", "1", "--top", "5"]);
    assert_eq!(r["result"]["generatedInLowestDegree"], true);
    assert_eq!(r["result"]["extension"], serde_json::json!([1, 2, 3, 4, 5, 6]));
    assert_eq!(r["result"]["persistenceHypothesis"], true);
}

#[test]
fn noncommutative_algebras_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let alg = dir.path().join("free.json");
    std::fs::write(
        &alg,
        r#"{"vars":[{"name":"x","degree":1},{"name":"y","degree":1}],"degreeBound":2,"field":"Fp:2","noncommutative":true}"#,
    )
    .unwrap();
    let module = dir.path().join("m.json");
    // x then y is nonzero while yx acts by zero: a module only because A is free
    std::fs::write(
        &module,
        r#"{"window":[0,2],"dims":[1,1,1],"actions":[
            {"source":0,"element":"y","matrix":[[1]]},
            {"source":1,"element":"x","matrix":[[1]]},
            {"source":0,"element":"xy","matrix":[[1]]}]}"#,
    )
    .unwrap();
    let r = report(&["mc-check", "--algebra", alg.to_str().unwrap(), "--module", module.to_str().unwrap()]);
    assert_eq!(r["result"]["commutative"], false);
    assert_eq!(r["result"]["isModule"], true);
}
