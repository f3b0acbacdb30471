use softqed::harness::report::parse_csv;
use std::path::Path;
use std::process::{Command, Output};

fn softqed(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softqed"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"seed": 1, "sede": 2}"#);
    let out = softqed(&["verify", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sede"));
}

#[test]
fn malformed_json_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", "{ seed: ");
    assert_eq!(softqed(&["action", "--config", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn unknown_tolerance_name_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"tolerances": {"no_such_check": 1.0}}"#);
    assert_eq!(softqed(&["verify", "--config", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn impossible_tolerance_fails_but_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"tolerances": {"ward_identity": 1e-30}}"#);
    let out = softqed(&["verify", "--config", &cfg, "--out", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let ward = checks.iter().find(|c| c["name"] == "ward_identity").unwrap();
    assert_eq!(ward["passed"], false);
    assert_eq!(ward["tolerance"], 1e-30);
    assert_eq!(report["summary"]["failed"], 1);
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn report_fields_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let out = softqed(&["action", "--out", "a.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let keys = ["\"schema_version\"", "\"tool\"", "\"version\"", "\"command\"", "\"seed\"", "\"generator\"", "\"config\"", "\"checks\"", "\"summary\"", "\"data\""];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"seed": 5}"#);
    softqed(&["action", "--config", &cfg, "--seed", "9", "--out", "a.json"], dir.path());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 9);
}

#[test]
fn output_path_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"output_path": "from_config.csv"}"#);
    assert_eq!(softqed(&["current", "--config", &cfg], dir.path()).status.code(), Some(0));
    assert!(dir.path().join("from_config.csv").exists());
}

#[test]
fn empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"current_grid": {"k_min": 0.01, "k_max": 1.0, "n_radial": 0, "n_angular": 4}}"#,
    );
    let out = softqed(&["current", "--config", &cfg, "--out", "j.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("j.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("k0,k1,k2,k3,ReJ0,ImJ0"));
}

#[test]
fn reversed_loop_negates_current() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = write(dir.path(), "f.json", r#"{"loop": [[0,0,0,0],[1,0.5,0.2,0],[2,0.1,-0.3,0.2]]}"#);
    let rev = write(dir.path(), "r.json", r#"{"loop": [[2,0.1,-0.3,0.2],[1,0.5,0.2,0],[0,0,0,0]]}"#);
    softqed(&["current", "--config", &fwd, "--out", "f.csv"], dir.path());
    softqed(&["current", "--config", &rev, "--out", "r.csv"], dir.path());
    let f = parse_csv(&std::fs::read_to_string(dir.path().join("f.csv")).unwrap()).unwrap();
    let r = parse_csv(&std::fs::read_to_string(dir.path().join("r.csv")).unwrap()).unwrap();
    assert_eq!(f.rows.len(), r.rows.len());
    for (a, b) in f.rows.iter().zip(&r.rows) {
        assert_eq!(a[..4], b[..4]);
        for c in 4..12 {
            assert!((a[c] + b[c]).abs() <= 1e-12 * (1.0 + a[c].abs()), "{} vs {}", a[c], b[c]);
        }
    }
}

#[test]
fn invalid_loop_is_a_domain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"loop": [[0,0,0,0],[1,0,0,0]]}"#);
    assert_eq!(softqed(&["current", "--config", &cfg], dir.path()).status.code(), Some(1));
}

#[test]
fn degenerate_line_fails_decompose_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"chain": {"vertices": [{"kind": "plain_gamma", "momentum": [0,0,0,0], "index": 2}]}}"#,
    );
    let out = softqed(&["decompose", "--config", &cfg, "--out", "d.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(dir.path().join("d.json")).unwrap();
    assert!(text.contains("coincident poles"));
}

#[test]
fn decompose_with_classical_photons_emits_theta_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"chain": {"classical": [{"momentum": [0.2, 0.05, 0.0, 0.1], "index": 0},
                                    {"momentum": [0.1, 0.0, 0.05, 0.0], "index": 3}]}}"#,
    );
    let out = softqed(&["decompose", "--config", &cfg, "--out", "d.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(report["data"]["theta"]["terms"].as_array().unwrap().len(), 4);
    assert_eq!(report["data"]["poles"].as_array().unwrap().len(), 2);
}

#[test]
fn zero_charge_coherent_has_zero_phase() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"charge": 0.0, "k_min_ladder": [0.1, 0.01]}"#);
    assert_eq!(softqed(&["coherent", "--config", &cfg, "--out", "c.csv"], dir.path()).status.code(), Some(0));
    let t = parse_csv(&std::fs::read_to_string(dir.path().join("c.csv")).unwrap()).unwrap();
    assert_eq!(t.header, ["k_min", "photon_number", "norm_factor", "phi_cross"]);
    assert_eq!(t.rows.len(), 2);
    assert!(t.rows.iter().all(|r| r[3] == 0.0));
    assert!(t.rows[1][1] > t.rows[0][1]);
}

#[test]
fn timelike_action_loop_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"action_loop": null}"#);
    let out = softqed(&["action", "--config", &cfg, "--out", "a.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    assert!(text.contains("extrapolation does not converge"), "{text}");
}
