// SPDX-License-Identifier: Apache-2.0

use serde_json::Value;
use std::process::{Command, Output};

fn qmetro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmetro")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn bound_product_strong() {
    let v = json(&qmetro(&["bound", "--family", "product", "--form", "strong", "--n", "1", "--nu", "100", "--T", "1", "--gamma2", "1"]));
    assert!((f(&v, "delta_g") - 0.271_828_182_845_904_5).abs() < 1e-12);
    let q: qmetro::bounds::BoundQuery = serde_json::from_value(v["inputs"].clone()).unwrap();
    assert_eq!(q.nu, 100);
    assert_eq!(q.params.gamma2(), 1.0);
}

#[test]
fn bound_cat_nodec() {
    let v = json(&qmetro(&["bound", "--family", "cat", "--form", "nodec", "--n", "4", "--nu", "25", "--T", "1"]));
    assert!((f(&v, "delta_g") - 0.05).abs() < 1e-15);
}

#[test]
fn bound_zero_time_is_a_validation_error() {
    let out = qmetro(&["bound", "--nu", "10", "--T", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverge"));
}

#[test]
fn bound_rejects_invalid_channel() {
    let out = qmetro(&["bound", "--nu", "10", "--T", "1", "--gamma1", "2", "--gamma2", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma2 >= gamma1/2"));
}

#[test]
fn optimize_transition() {
    let v = json(&qmetro(&["optimize", "--family", "cat", "--R", "1e4", "--tau", "0.5", "--gamma2", "1"]));
    assert_eq!(v["regime"], "transition");
    assert!((f(&v["continuous"], "n") - 2.0).abs() < 1e-12);
    assert_eq!(v["n"], 2);
    let res: qmetro::allocator::Resources = serde_json::from_value(v["inputs"].clone()).unwrap();
    assert_eq!(res.r, 1e4);
}

#[test]
fn optimize_without_dephasing() {
    let v = json(&qmetro(&["optimize", "--family", "cat", "--R", "1000", "--tau", "1"]));
    assert_eq!(v["regime"], "low-dec");
    assert_eq!(f(&v["continuous"], "T"), 0.5);
}

#[test]
fn optimize_high_dephasing() {
    let v = json(&qmetro(&["optimize", "--family", "cat", "--R", "1e4", "--tau", "5", "--gamma2", "1"]));
    assert_eq!(v["regime"], "high-dec");
    assert_eq!(v["n"], 1);
}

#[test]
fn optimize_infeasible_exit_code() {
    let out = qmetro(&["optimize", "--R", "10", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn figure3_defaults() {
    let out = qmetro(&["figure", "--which", "3", "--points", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma2_tau,sqrt_R_over_gamma2,dimensionless_bound_cat,dimensionless_bound_product,regime"
    );
    assert_eq!(lines.count(), 50 * 4);
    let again = qmetro(&["figure", "--which", "3", "--points", "50"]);
    assert_eq!(text.as_bytes(), &again.stdout[..]);
    let seq = qmetro(&["--sequential", "figure", "--which", "3", "--points", "50"]);
    assert_eq!(text.as_bytes(), &seq.stdout[..]);
}

#[test]
fn figure2_monotone() {
    let out = qmetro(&["figure", "--which", "2", "--grid-min", "0.01", "--grid-max", "100", "--points", "60"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "gamma2_tau,gamma2_Tp,dimensionless_bound");
    let tp: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(tp.len(), 60);
    assert!(tp.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn simulate_sweet_spot() {
    let v = json(&qmetro(&["simulate", "--family", "product", "--gamma2", "0", "--gT-sweet", "--nu", "10000", "--seed", "7"]));
    assert!((f(&v, "empirical_delta_g") - 0.01).abs() < 0.0005, "{v}");
    let cfg: qmetro::montecarlo::TrialConfig = serde_json::from_value(v["inputs"].clone()).unwrap();
    assert_eq!(cfg.seed, 7);
    assert!((cfg.spec.g - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn simulate_missing_seed_warns() {
    let out = qmetro(&["simulate", "--nu", "100", "--experiments", "20", "--g", "1.5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed 0"));
}

#[test]
fn verify_small_cap() {
    let out = qmetro(&["verify", "--n-max", "4", "--draws", "50"]);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    let opts: qmetro::verify::VerifyOptions = serde_json::from_value(v["inputs"].clone()).unwrap();
    assert_eq!(opts.n_max, 4);
}

#[test]
fn verify_cap_rejected() {
    let out = qmetro(&["verify", "--n-max", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn verify_failure_exit_code() {
    let out = qmetro(&["verify", "--n-max", "2", "--draws", "5", "--tolerance", "1e-300", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("suite,passed,checks,failures"));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"family": "cat", "form": "nodec", "n": 4, "nu": 25, "T": 2.0}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&qmetro(&["--config", cfg, "bound"]));
    assert!((f(&v, "delta_g") - 0.025).abs() < 1e-15);
    let v = json(&qmetro(&["--config", cfg, "bound", "--T", "1"]));
    assert!((f(&v, "delta_g") - 0.05).abs() < 1e-15);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"nu": 25, "temperature": 3}"#).unwrap();
    let out = qmetro(&["--config", bad.to_str().unwrap(), "bound"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_path_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bound.csv");
    let out = qmetro(&["--format", "csv", "--output", path.to_str().unwrap(), "bound", "--nu", "100", "--T", "1"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "delta_g,dimensionless,family,form,n,nu,T,gamma1,gamma2,mu");
    assert!(text.lines().nth(1).unwrap().starts_with("0.1"));
}

#[test]
fn thread_env_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_qmetro"))
        .env("QMETRO_THREADS", "many")
        .args(["bound", "--nu", "1", "--T", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_qmetro"))
        .env("QMETRO_THREADS", "2")
        .args(["bound", "--nu", "1", "--T", "1"])
        .output()
        .unwrap();
    assert!(ok.status.success());
}
