use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unisig"))
        .args(args)
        .output()
        .expect("spawn unisig")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("single JSON document")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn sigma_values() {
    for (t, n, want) in [("-1", "6", 2.0), ("-1", "60", 2.0), ("0", "1", 1.0)] {
        let v = json(&["sigma", "--t", t, "--n", n]);
        assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-15, "{v}");
    }
    let v = json(&["sigma", "--t", "-1", "--n", "60"]);
    assert_eq!(v["factorization"], "2^2 * 3 * 5");
    assert_eq!(v["unitary_divisor_count"], 8);
    assert_eq!(code(&run(&["sigma", "--t", "1", "--n", "0"])), 2);
}

#[test]
fn eta_star_outputs() {
    let v = json(&["eta-star", "--tol", "1e-7"]);
    assert!((v["value"].as_f64().unwrap() - 1.974_255_0).abs() < 1e-6);
    let v = json(&["eta-star", "--tol", "1e-12"]);
    assert!(v["equation_residual"].as_f64().unwrap() < 1e-10);
    let b = &v["bracket"];
    assert!(b[1].as_f64().unwrap() - b[0].as_f64().unwrap() <= 1e-12);
    let v = json(&["eta-star", "--tol", "1"]);
    let x = v["value"].as_f64().unwrap();
    assert!((1.5..=2.0).contains(&x));
    assert_eq!(code(&run(&["eta-star", "--tol", "1e-20"])), 2);
}

#[test]
fn classify_verdicts() {
    for (t, want) in [
        ("-1.9", "connected"),
        ("-2.5", "disconnected"),
        ("1", "disconnected"),
        ("-0.5", "connected"),
    ] {
        let v = json(&["classify", "--t", t]);
        assert_eq!(v["verdict"], want, "t = {t}");
    }
    let text = run(&["classify", "--t=-2.5"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("disconnected"));
}

#[test]
fn certify_all_passes_and_detects_sabotage() {
    let out = run(&["certify-all", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_passed"], true);
    let certs = v["slope_certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 6);
    assert!(certs.iter().all(|c| c["grid_points"] == 2801));
    assert_eq!(v["gap_certificate"]["grid_points"], 401);

    let out = run(&["certify-all", "--j-margin", "0.01", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("J_2 grid certificate"));
}

#[test]
fn greedy_runs() {
    let v = json(&["greedy", "--r", "1.5", "--target", "1.3", "--max-primes", "20000"]);
    assert!(v["residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["converged"], true);

    let v = json(&["greedy", "--r", "3", "--target", "1.095"]);
    assert_eq!(v["stall"]["stalled"], true);
    assert_eq!(v["stall"]["gap"]["witness_m"], 1);
    assert!(v["residual"].as_f64().unwrap() > (1.095f64 / 1.067).ln() - 1e-6);

    let v = json(&["greedy", "--r", "2", "--target", "1.2", "--max-primes", "5", "--trace"]);
    assert!(v["trace"]["steps"].as_array().unwrap().len() <= 5);

    assert_eq!(code(&run(&["greedy", "--r", "1.5", "--target", "5"])), 2);
    assert_eq!(code(&run(&["greedy", "--r", "0.5", "--target", "1.1"])), 2);
}

#[test]
fn gaps_at_three() {
    let v = json(&["gaps", "--r", "3"]);
    let gaps = v["gaps"].as_array().unwrap();
    let g = &gaps[0];
    assert_eq!(g["witness_m"], 1);
    assert!((g["lo"].as_f64().unwrap() - 1.06669).abs() < 1e-5);
    assert_eq!(g["hi"].as_f64().unwrap(), 1.125);
    assert!(json(&["gaps", "--r", "1.5"])["gaps"].as_array().unwrap().is_empty());

    let v = json(&["gaps", "--r", "2.5", "--verify-limit", "100000"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["empty"] == true));

    let out = run(&["gaps", "--r", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("witness_m,lo,hi\n1,"));
    assert_eq!(code(&run(&["gaps", "--r", "1"])), 2);
}

#[test]
fn enumerate_csv_and_json() {
    let out = run(&["enumerate", "--r", "2", "--limit", "10"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[0], "1.0");
    assert_eq!(lines[9], "1.3888888888888888");

    let out = run(&["enumerate", "--r", "2", "--limit", "4", "--header", "--format", "csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "value\n1.0\n1.0625\n1.1111111111111112\n1.25\n"
    );

    let v = json(&["enumerate", "--r", "2", "--limit", "10"]);
    assert_eq!(v["count"], 10);

    let path: PathBuf = std::env::temp_dir().join(format!("unisig-enum-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&["enumerate", "--r", "3", "--limit", "1000", "--out", p]);
    assert_eq!(code(&out), 0);
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let values: Vec<f64> = written.lines().map(|l| l.parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));

    assert_eq!(code(&run(&["enumerate", "--r", "2", "--limit", "3000000"])), 2);
}

#[test]
fn components_count() {
    let v = json(&["components", "--r", "1.5", "--limit", "1000000", "--resolution", "1e-3"]);
    assert_eq!(v["estimated_components"], 1);
    assert_eq!(v["heuristic"], true);
    let v = json(&["components", "--r", "3", "--limit", "100000"]);
    assert!(v["estimated_components"].as_u64().unwrap() >= 2);
}

#[test]
fn json_is_byte_identical_across_runs_and_threads() {
    let args = ["certify-all", "--format", "json"];
    let a = run(&args).stdout;
    let b = run(&[&args[..], &["--threads", "1"]].concat()).stdout;
    let c = run(&[&args[..], &["--threads", "3"]].concat()).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
    let args = ["components", "--r", "2.5", "--limit", "200000", "--format", "json"];
    assert_eq!(
        run(&args).stdout,
        run(&[&args[..], &["--threads", "2"]].concat()).stdout
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["--zeta-tol", "0", "classify", "--t", "-2"])), 2);
    assert_eq!(code(&run(&["--sieve-limit", "1", "classify", "--t", "-2"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["classify", "--t", "-2", "--format", "csv"])), 2);
    assert_eq!(code(&run(&["sigma", "--t", "x", "--n", "2"])), 2);
}
