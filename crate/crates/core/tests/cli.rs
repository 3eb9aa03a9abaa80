use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE: &str = r#"{"p":1,"v":[0,0,0],"H":[0,0,1],"Hv":[0,0.5,0],"E":1,"kappa":0,"epsilon":1e-6}"#;

fn pvstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvstab"))
        .args(args)
        .env_remove("PV_STAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn check_stability_sufficient_and_not() {
    let ok = r#"{"p":1,"v":[0,0,0],"H":[0,0,1],"Hv":[0,1,0],"E":0.4,"kappa":0,"epsilon":1e-6}"#;
    let out = pvstab(&["check-stability", "--state", ok, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "Sufficient");
    assert_eq!(v["case"], "PCase");
    assert!(v["config"]["state"].is_object());

    let out = pvstab(&["check-stability", "--state", FIXTURE]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "NotSufficient");
}

#[test]
fn check_stability_collinear_is_inapplicable() {
    let s = r#"{"p":1,"v":[0,0,0],"H":[0,1,0],"Hv":[0,2,0],"E":0.1,"kappa":0,"epsilon":1e-6}"#;
    let out = pvstab(&["check-stability", "--state", s, "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "Inapplicable");
}

#[test]
fn invalid_state_exits_2_with_schema_hint() {
    let bad = r#"{"p":1,"v":[0,0,0],"H":[0.5,0,1],"Hv":[0,1,0],"E":0.1,"kappa":0,"epsilon":1e-6}"#;
    let out = pvstab(&["check-stability", "--state", bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("state JSON keys"), "{err}");

    let out = pvstab(&["check-stability", "--state", "{not json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pvstab(&["check-stability"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pvstab(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn roots_reports_fixture_mode() {
    let out = pvstab(&["roots", "--state", FIXTURE, "--psi", "0", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let roots = v["roots"].as_array().unwrap();
    assert!(!roots.is_empty());
    let tau = roots[0]["tau"].as_array().unwrap();
    assert!((tau[0].as_f64().unwrap() - 0.950_628_589_6).abs() < 1e-8);
    assert_eq!(v["config"]["tolerances"]["tau_tol"].as_f64(), Some(1e-8));
}

#[test]
fn roots_unsupported_case_exits_1() {
    let s = r#"{"p":1,"v":[0,0,0.3],"H":[0,0,1],"Hv":[0,0.5,0],"E":1,"kappa":0,"epsilon":1e-6}"#;
    let out = pvstab(&["roots", "--state", s, "--psi", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tolerance_flag_beats_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tau_tol": 1e-3, "r_tol": 1e-7}"#).unwrap();
    let out = pvstab(&[
        "roots",
        "--state",
        FIXTURE,
        "--config",
        cfg.to_str().unwrap(),
        "--tau-tol",
        "1e-5",
        "--json",
    ]);
    let v = json(&out);
    assert_eq!(v["config"]["tolerances"]["tau_tol"].as_f64(), Some(1e-5));
    assert_eq!(v["config"]["tolerances"]["r_tol"].as_f64(), Some(1e-7));

    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    let out = pvstab(&["roots", "--state", FIXTURE, "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_writes_csv_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("map.csv");
    let out = pvstab(&[
        "scan",
        "--H3",
        "1",
        "--grid",
        "6x5",
        "--psi-step",
        "0.1",
        "--out",
        csv.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["points"], 30);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 31);
    assert!(text.starts_with("E1,H2,verdict,label,max_growth_rate\n"));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("map.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["spec"]["psi_step"].as_f64(), Some(0.1));
}

#[test]
fn scan_to_stdout_is_deterministic_across_threads() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_pvstab"))
            .args(["scan", "--grid", "5x5", "--H3", "0.5", "--psi-step", "0.2", "--format", "json"])
            .env("PV_STAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let a = run("1");
    assert_eq!(a, run("2"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema"], "pv-scan/1");
}

#[test]
fn scan_rejects_bad_spec() {
    let out = pvstab(&["scan", "--grid", "0x5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pvstab(&["scan", "--epsilon", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dump_matrices_emits_all_blocks() {
    let out = pvstab(&["dump-matrices", "--state", FIXTURE, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v.as_object().unwrap().len() > 3);
}
