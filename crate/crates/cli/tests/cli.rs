use std::process::{Command, Output};

use serde_json::Value;

fn ising_ff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ising-ff"))
        .args(args)
        .env_remove("ISING_FF_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn form_factor_routes_agree() {
    let out = ising_ff(&["ff", "--kx", "0.4", "--ky", "0.7", "--n", "4", "--site", "0", "--bra", "0,1", "--ket", ""]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["results"][0];
    for key in ["re", "im", "abs"] {
        assert!(r["closed"][key].is_f64() && r["pfaffian"][key].is_f64());
    }
    assert_eq!(r["agree_pfaffian"], Value::Bool(true));
    assert_eq!(r["agree_oracle"], Value::Bool(true));
    assert!(r["oracle_abs"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_all_passes() {
    let out = ising_ff(&["verify", "all", "--kx", "0.3", "--ky", "0.9", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn params_reports_derived_scalars() {
    let out = ising_ff(&["params", "--kx", "0.5", "--ky", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ferromagnetic"], Value::Bool(true));
    assert!(v["kx_star"].as_f64().unwrap() < 0.5);
    for key in ["k", "big_k", "big_kprime", "eta", "xi"] {
        assert!(v[key].is_f64(), "{key}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["corr", "--kx", "0.4", "--ky", "0.7", "--n", "5", "--m-height", "6", "--dx", "2", "--dy", "3"];
    assert_eq!(ising_ff(&args).stdout, ising_ff(&args).stdout);
}

#[test]
fn csv_has_one_row_per_pair() {
    let out = ising_ff(&[
        "ff", "--output", "csv", "--kx", "0.4", "--ky", "0.7", "--n", "4", "--bra", "", "--bra", "0,1", "--ket", "",
        "--ket", "1,2", "--ket", "0,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    assert!(text.starts_with("kx,ky,n,site,bra,ket,"));
}

#[test]
fn exit_codes() {
    assert_eq!(ising_ff(&["ff", "--kx", "0.4", "--ky", "0.7", "--n", "4", "--bra", "a"]).status.code(), Some(2));
    assert_eq!(ising_ff(&["params", "--kx", "0.3", "--ky", "0.6"]).status.code(), Some(3));
    assert_eq!(ising_ff(&["ff", "--kx", "0.4", "--ky", "0.7", "--n", "4", "--bra", "0"]).status.code(), Some(3));
    let big = ["corr", "--kx", "0.4", "--ky", "0.7", "--n", "40", "--m-height", "4", "--cutoff", "40"];
    assert_eq!(ising_ff(&big).status.code(), Some(4));
    let strict = Command::new(env!("CARGO_BIN_EXE_ising-ff"))
        .args(["verify", "rotation", "--kx", "0.4", "--ky", "0.7", "--n", "3"])
        .env("ISING_FF_TOLERANCE", "1e-18")
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(5));
    assert_eq!(json(&strict)["passed"], Value::Bool(false));
}
