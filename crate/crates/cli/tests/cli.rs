//! End-to-end tests of the binary: exit codes, JSON schema, determinism.

use std::process::{Command, Output};

const KV: &str = "z1^2+z2^2+z3^2-2 z1 z2-2 z1 z3-2 z2 z3";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aglerkit"))
        .args(args)
        .env("AGLERKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn norm_sa_of_the_quadratic_counterexample() {
    let out = run(&["norm", "sa", "--poly", KV, "--d", "3"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "aglerkit.result/1");
    assert_eq!(doc["command"], "norm.sa");
    assert_eq!(doc["result"]["kind"], "sdp-optimal");
    let value = doc["result"]["value"].as_f64().unwrap();
    assert!((value - 6.0).abs() < 1e-5, "value {value}");
}

#[test]
fn norm_sa_of_a_monomial() {
    let out = run(&["norm", "sa", "--poly", "z1^2", "--d", "1"]);
    let doc = stdout_json(&out);
    let value = doc["result"]["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() < 1e-6);
}

#[test]
fn usage_errors_exit_one() {
    // missing polynomial source
    let out = run(&["norm", "sa", "--d", "3"]);
    assert_eq!(out.status.code(), Some(1));
    // mixed-degree polynomial
    let out = run(&["norm", "sa", "--poly", "z1 + z2^2", "--d", "2"]);
    assert_eq!(out.status.code(), Some(1));
    // unknown subcommand
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["norm", "dual", "--poly", KV, "--d", "3", "--seed", "42"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fixture_verification_passes_and_reports_exact_values() {
    for name in ["vk", "crabb_davie", "holbrook", "tto"] {
        let out = run(&["fixture", name, "--verify"]);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = run(&["fixture", "tto", "--verify", "--format", "text"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("144/5"), "{text}");
    // unknown fixture is a usage error
    let out = run(&["fixture", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certificate_roundtrip_through_certify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("kv_sa.json");
    let out = run(&[
        "norm",
        "sa",
        "--poly",
        KV,
        "--d",
        "3",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc = stdout_json(&out);
    assert!(doc["certificate_path"].as_str().is_some());

    let out = run(&[
        "certify",
        "--certificate",
        cert.to_str().unwrap(),
        "--poly",
        KV,
        "--d",
        "3",
        "--tol",
        "1e-6",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["membership"], true);
    let bound = doc["certified_lower_bound"].as_f64().unwrap();
    assert!((bound - 6.0).abs() < 1e-4, "bound {bound}");

    // corrupting a block entry must fail verification with exit 3
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    parsed["blocks"][0]["entries"][0][0] = serde_json::Value::String("-5".into());
    std::fs::write(&cert, serde_json::to_string(&parsed).unwrap()).unwrap();
    let out = run(&["certify", "--certificate", cert.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn exact_fixture_certificate_verifies_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("holbrook.json");
    let out = run(&[
        "fixture",
        "holbrook",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "certify",
        "--certificate",
        cert.to_str().unwrap(),
        "--poly",
        KV,
        "--d",
        "3",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["mode"], "exact");
    assert_eq!(doc["membership"], true);
    let bound = doc["certified_lower_bound"].as_f64().unwrap();
    assert!((bound - 6.0).abs() < 1e-12);
}

#[test]
fn bounds_report_for_the_holbrook_dual() {
    let out = run(&[
        "bounds",
        "--poly",
        "z1^2+z2^2+z3^2-1/2 z1 z2-1/2 z1 z3-1/2 z2 z3",
        "--d",
        "3",
        "--exact",
    ]);
    let doc = stdout_json(&out);
    let best = doc["best"]["value"].as_f64().unwrap();
    assert!((best - 1.0).abs() < 1e-9, "best {best}");
    // the exact method-2 rows carry rational squares
    let rows = doc["bounds"].as_array().unwrap();
    assert!(rows
        .iter()
        .any(|r| r["method"] == 2 && r["exact_value_sq"] == "3/2"));
    assert!(rows.iter().all(|r| r["certificate_verified"] == true));
}

#[test]
fn dixon_emits_certified_family() {
    let out = run(&["dixon", "--d", "5", "--r", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["membership"], true);
    assert_eq!(doc["dual_norm_one"], true);
    let n = doc["family_size"].as_u64().unwrap();
    assert!(n >= 2);
    assert_eq!(doc["certified_bound"].as_str().unwrap(), n.to_string());
}

#[test]
fn kvh_scan_matches_closed_forms() {
    let out = run(&[
        "kvh-scan", "--d", "2", "--t-min", "-1", "--t-max", "1", "--t-step", "1", "--format", "csv",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,sa_sdp,sa_closed,sa_dev,dual_sdp,dual_closed,dual_dev"
    );
    assert_eq!(lines.count(), 3);

    let out = run(&[
        "kvh-scan", "--d", "3", "--t-min", "-2", "--t-max", "2", "--t-step", "0.5",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["max_sa_dev"].as_f64().unwrap() < 1e-4);
    assert!(doc["max_dual_dev"].as_f64().unwrap() < 1e-4);
}

#[test]
fn wp_norm_takes_a_split_level() {
    let out = run(&[
        "norm",
        "wp",
        "--poly",
        "z1^2 z2 + z2^3",
        "--d",
        "2",
        "--k",
        "1",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["command"], "norm.wp");
    assert!(doc["result"]["value"].as_f64().unwrap() > 0.0);
}
