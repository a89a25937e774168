//! End-to-end checks of the command-line surface.

use std::process::{Command, Output};

fn blockpow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockpow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn enumerate_lists_binary_squares() {
    let out = blockpow(&["enumerate", "--base", "2", "--k", "2", "--limit", "63"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["0", "3", "10", "15", "36", "45", "54", "63"]);
}

#[test]
fn enumerate_json_parses() {
    let out = blockpow(&["enumerate", "--k", "3", "--limit", "511", "--json"]);
    assert!(out.status.success());
    let values: Vec<String> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(values.first().map(String::as_str), Some("0"));
    assert_eq!(values.last().map(String::as_str), Some("511"));
}

#[test]
fn enumerate_csv_has_header() {
    let out = blockpow(&["enumerate", "--k", "2", "--limit", "15", "--csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value"));
    assert_eq!(lines.next(), Some("0"));
}

#[test]
fn gcd_prints_plain_value_and_chain() {
    let out = blockpow(&["gcd", "--base", "2", "--k", "6"]);
    assert_eq!(stdout(&out).trim(), "3");

    let out = blockpow(&["gcd", "--base", "2", "--k", "6", "--chain"]);
    assert!(out.status.success());
    let chain: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(chain["closed_form"], "3");
    assert_eq!(chain["set_gcd"], "3");
}

#[test]
fn frobenius_known_value() {
    let out = blockpow(&["frobenius", "--k", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "52753");
}

#[test]
fn frobenius_witness_lists_terms() {
    let out = blockpow(&["frobenius", "--k", "2", "--witness", "18"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next() == Some("17"));
    assert!(text.contains(" x "));
}

#[test]
fn decompose_membership_certificate() {
    let out = blockpow(&["decompose", "--k", "3", "3549"]);
    assert!(out.status.success());
    let cert: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(cert["N"], "3549");
    assert_eq!(cert["count"], "1");
}

#[test]
fn decompose_below_frobenius_exits_one() {
    let out = blockpow(&["decompose", "--k", "2", "17"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Frobenius"));
}

#[test]
fn decompose_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let path_str = path.to_str().unwrap();

    for (k, n) in [("2", "987654321"), ("3", "123456789"), ("5", "1000000000000000")] {
        let out = blockpow(&["decompose", "--k", k, n, "--out", path_str]);
        assert!(out.status.success(), "decompose --k {k} {n} failed");
        let check = blockpow(&["verify", path_str]);
        assert!(check.status.success(), "verify failed for k = {k}");
        assert!(stdout(&check).contains("certificate OK"));
    }
}

#[test]
fn verify_rejects_tampered_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let path_str = path.to_str().unwrap();

    let out = blockpow(&["decompose", "--k", "2", "45", "--out", path_str]);
    assert!(out.status.success());
    let tampered = std::fs::read_to_string(&path).unwrap().replace("\"45\"", "\"46\"");
    std::fs::write(&path, tampered).unwrap();
    let check = blockpow(&["verify", path_str]);
    assert_eq!(check.status.code(), Some(1));
}

#[test]
fn census_summary_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exceptions.csv");
    let path_str = path.to_str().unwrap();

    let out = blockpow(&[
        "census", "--k", "2", "--cap", "4", "--limit", "1000", "--dump", path_str,
    ]);
    assert!(out.status.success());
    let dump = std::fs::read_to_string(&path).unwrap();
    let mut lines = dump.lines();
    assert_eq!(lines.next(), Some("exception"));
    // 1 is never a sum of binary squares
    assert!(dump.lines().any(|l| l == "1"));
}

#[test]
fn census_json_summary() {
    let out = blockpow(&["census", "--k", "3", "--cap", "9", "--limit", "200000", "--json"]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["max_exception"], 147615);
}

#[test]
fn sumset_reports_uniqueness() {
    let out = blockpow(&["sumset", "--k", "2", "--n", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("observed 32 of expected 32"));
}

#[test]
fn density_json_contains_partial_sums() {
    let out = blockpow(&[
        "density", "--base", "2", "--g", "1", "--depth", "40", "--empirical-k", "2000", "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["nonempty"], true);
    assert!(report["partial_sums"].as_array().unwrap().len() >= 2);
    assert!(report["empirical"]["matching"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_level_is_a_usage_error() {
    let out = blockpow(&["selftest", "--level", "bogus"]);
    assert!(!out.status.success());
    assert_ne!(out.status.code(), Some(1)); // usage, not a domain error
}

#[test]
fn bad_number_is_a_domain_error() {
    let out = blockpow(&["decompose", "--k", "2", "not-a-number"]);
    assert_eq!(out.status.code(), Some(1));
}
