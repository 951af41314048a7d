//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_baerconic"))
}

#[test]
fn classify_emits_report_json() {
    let out = bin()
        .args(["classify", "--q", "3", "--conic", "1,0+e*1,0,0,1,0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["q"], 3);
    assert_eq!(v["case"], "irreducible_singular");
    assert_eq!(v["predicted"], 7);
    assert_eq!(v["oracle"], 7);
    assert_eq!(v["match"], true);
}

#[test]
fn classify_reports_refusal_with_oracle() {
    // X² + Y² + εZ² has no subplane point; the oracle still runs.
    let out = bin()
        .args(["classify", "--q", "3", "--conic", "1,0,1,0,0,0+e*1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["case"], "refused_no_subplane_point");
    assert_eq!(v["predicted"], serde_json::Value::Null);
    assert!(v["oracle"].is_u64());
}

#[test]
fn classify_rejects_bad_input() {
    let out = bin()
        .args(["classify", "--q", "3", "--conic", "1,0,0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let out = bin()
        .args(["classify", "--q", "4", "--conic", "1,0,0,0,0,1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let out = bin()
        .args(["classify", "--q", "3", "--conic", "1,0,0,0,0,0"])
        .output()
        .unwrap();
    assert!(!out.status.success(), "singular conic must be rejected");
}

#[test]
fn sample_writes_expected_csv() {
    let dir = std::env::temp_dir().join(format!("baerconic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sample_q5.csv");
    let out = bin()
        .args([
            "sample", "--q", "5", "--n", "500", "--seed", "42", "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q,case,k,s_q,n0,alpha,beta,delta_class,delta_prime_class,kappa_zero,predicted,oracle,match"
    );
    assert_eq!(lines.count(), 500);

    // Same seed, different worker count: byte-identical output.
    let path2 = dir.join("sample_q5_w2.csv");
    let out = bin()
        .args([
            "sample", "--q", "5", "--n", "500", "--seed", "42", "--workers", "2", "--out",
            path2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());

    // JSON-lines variant parses per row.
    let path3 = dir.join("sample_q5.jsonl");
    let out = bin()
        .args([
            "sample", "--q", "5", "--n", "50", "--seed", "1", "--format", "json", "--out",
            path3.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path3).unwrap();
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["match"], true);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_dir_env_var_prefixes_relative_paths() {
    let dir = std::env::temp_dir().join(format!("baerconic-outdir-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = bin()
        .env("BAERCONIC_OUT_DIR", &dir)
        .args(["sample", "--q", "5", "--n", "10", "--seed", "3", "--out", "rows.csv"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(Path::new(&dir.join("rows.csv")).exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn enumerate_writes_all_rows_at_q3() {
    let dir = std::env::temp_dir().join(format!("baerconic-enum-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("all_q3.csv");
    let out = bin()
        .args(["enumerate", "--q", "3", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    // Header plus one row per nonsingular conic through (0:1:0).
    assert_eq!(text.lines().count(), 1 + 6480);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn enumerate_guard_and_verify_exit_codes() {
    let out = bin()
        .args(["enumerate", "--q", "5", "--out", "/tmp/should_not_exist.csv"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("q = 3"), "unhelpful guard message: {msg}");

    let out = bin()
        .args(["verify", "--q", "7", "--mode", "sample", "--n", "2000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS"), "{text}");
}

#[test]
fn verify_exhaustive_q3_via_cli() {
    let dir = std::env::temp_dir().join(format!("baerconic-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let agg_path = dir.join("agg.json");
    let out = bin()
        .args(["verify", "--q", "3", "--out", agg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&agg_path).unwrap()).unwrap();
    assert_eq!(v["aggregate"]["mismatch_count"], 0);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    std::fs::remove_dir_all(&dir).ok();
}
