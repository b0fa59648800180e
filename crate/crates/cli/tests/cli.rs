use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn locstab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locstab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn shape(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.iter().map(|(k, x)| (k.clone(), shape(x))).collect()),
        Value::Array(a) => Value::Array(a.first().map(shape).into_iter().collect()),
        Value::Bool(_) => "bool".into(),
        Value::Number(_) => "number".into(),
        Value::Null => "null".into(),
        Value::String(_) => "string".into(),
    }
}

#[test]
fn counterexamples_match_golden_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = locstab(&["verify", "counterexamples"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let got: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    let golden: Value =
        serde_json::from_str(include_str!("golden/counterexamples_schema.json")).unwrap();
    assert_eq!(shape(&got), golden["shape"]);
    let ids: Vec<&Value> = got["checks"].as_array().unwrap().iter().map(|c| &c["id"]).collect();
    let want: Vec<&Value> = golden["check_ids"].as_array().unwrap().iter().collect();
    assert_eq!(ids, want);
    let cmi = got["checks"].as_array().unwrap().iter().find(|c| c["id"] == "e4.cmi").unwrap();
    assert!((cmi["measured"].as_f64().unwrap() - 0.1225562489).abs() < 1e-9);
    assert_eq!(got["pass"], Value::Bool(true));
}

#[test]
fn seeded_rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(locstab(&["verify", "cpq-properties", "--seed", "7"], a.path()).status.success());
    assert!(locstab(&["verify", "cpq-properties", "--seed", "7"], b.path()).status.success());
    let ja = fs::read(a.path().join("results.json")).unwrap();
    let jb = fs::read(b.path().join("results.json")).unwrap();
    assert_eq!(ja, jb);
    let v: Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(locstab(&["verify", "markov"], dir.path()).status.code(), Some(0));
    assert_eq!(locstab(&["verify", "nonsense"], dir.path()).status.code(), Some(2));
    // The purification suite carries a check that does not hold.
    let o = locstab(&["verify", "purification"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
    assert!(v["fitted"]["tfd.k"].as_f64().unwrap() > 0.0);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("locstab.conf");
    fs::write(&cfg, "seed = 5\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert!(locstab(&["verify", "lindblad", "--config", c], dir.path()).status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(v["seed"], 5);
    assert!(locstab(&["verify", "lindblad", "--config", c, "--seed", "9"], dir.path()).status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap()).unwrap();
    assert_eq!(v["seed"], 9);
}

#[test]
fn lindblad_scan_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = locstab(&["scan", "lindblad", "--tmax", "8", "--mmax", "6"], dir.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("lindblad_scan.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "model,beta,kind,x,error,gap,bound");
    assert_eq!(csv.lines().count(), 1 + 40 + 6);

    let p = dir.path().join("lindblad_scan.csv");
    let o = locstab(
        &["plot-data", p.to_str().unwrap(), "--columns", "x,error,bound", "--log", "error"],
        dir.path(),
    );
    assert!(o.status.success());
    let dat = fs::read_to_string(dir.path().join("lindblad_scan.dat")).unwrap();
    assert!(dat.starts_with('#'));
    let first = dat.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(first.split_whitespace().count(), 4);
}

#[test]
fn cap_dim_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let o = locstab(&["scan", "gibbs", "--n", "6", "--beta", "0.3", "--cap-dim", "32"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
}

#[test]
fn fixtures_listing() {
    let dir = tempfile::tempdir().unwrap();
    let o = locstab(&["fixtures"], dir.path());
    let s = String::from_utf8(o.stdout).unwrap();
    for name in ["E1", "E2", "E3", "E4", "gibbs-tfim"] {
        assert!(s.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}
