//! Acceptance suite: one PASS/FAIL line per criterion, backed by the
//! registered checks (default configuration, seed 42).

use softqed::harness::checks::run_all;
use softqed::harness::config::SuiteConfig;
use softqed::harness::report::CheckRecord;
use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

const CRITERIA: &[(u32, &str, &[&str])] = &[
    (1, "Clifford algebra", &["clifford_algebra"]),
    (2, "Ward identity", &["ward_identity"]),
    (3, "derivative identity convergence order", &["derivative_identity"]),
    (4, "classical insertion telescoping", &["c_hat_telescoping"]),
    (5, "commutativity of classical insertions", &["c_hat_commutativity"]),
    (6, "pole decomposition and degenerate rejection", &["pole_decomposition", "degenerate_poles_rejected"]),
    (
        7,
        "residues, symmetric cancellation, soft scaling",
        &["residue_limit", "symmetric_cancellation", "residue_soft_scaling"],
    ),
    (8, "theta expansion", &["theta_enumeration", "theta_cross_check"]),
    (9, "current conservation and segment closed form", &["current_gauge", "segment_closed_form"]),
    (10, "infrared logarithm of the pairing", &["ir_log_fit"]),
    (11, "truncated displacement operator", &["truncated_unitarity", "vacuum_overlap", "coherent_norm"]),
    (
        12,
        "classical action",
        &["action_oracle", "action_charge_scaling", "action_self_divergence"],
    ),
];

fn summarize(records: &[&CheckRecord]) -> String {
    records
        .iter()
        .map(|r| format!("{} {:.2e}/{:.1e}", r.name, r.residual, r.tolerance))
        .collect::<Vec<_>>()
        .join(", ")
}

fn determinism() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_softqed");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.json"));
        let status = Command::new(bin)
            .args(["verify", "--seed", "42", "--out"])
            .arg(&out)
            .output()
            .unwrap()
            .status;
        assert!(status.code().is_some());
        outputs.push(std::fs::read(&out).unwrap());
    }
    let same = outputs[0] == outputs[1];
    (same, format!("two CLI runs, {} bytes each, identical: {same}", outputs[0].len()))
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let records = run_all(&cfg);
    let elapsed = start.elapsed();
    let by_name: BTreeMap<&str, &CheckRecord> = records.iter().map(|r| (r.name.as_str(), r)).collect();

    let mut failures = Vec::new();
    for (id, title, names) in CRITERIA {
        let rs: Vec<&CheckRecord> = names.iter().map(|n| by_name[n]).collect();
        let ok = rs.iter().all(|r| r.passed);
        println!("{} criterion {id:>2}: {title} [{}]", if ok { "PASS" } else { "FAIL" }, summarize(&rs));
        if !ok {
            failures.push(*id);
        }
    }
    let (ok, detail) = determinism();
    println!("{} criterion 13: harness determinism [{detail}]", if ok { "PASS" } else { "FAIL" });
    if !ok {
        failures.push(13);
    }
    println!("suite runtime {:.1} s", elapsed.as_secs_f64());
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}

#[test]
fn ward_suite_is_fast() {
    let cfg = SuiteConfig::default();
    let spec = softqed::harness::checks::REGISTRY
        .iter()
        .find(|c| c.name == "ward_identity")
        .unwrap();
    let start = Instant::now();
    let r = softqed::harness::checks::run_one(spec, &cfg);
    assert!(r.passed);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}
