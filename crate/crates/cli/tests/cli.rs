use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ldgeom"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ldgeom-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], out: &Path) -> std::process::Output {
    bin().args(args).arg("--output").arg(out).env_remove("LDGEOM_OUT").output().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn volume_reports_limit_and_ratio() {
    let d = scratch("volume");
    let o = run(&["volume", "--m", "power:2", "--r", "1", "--n", "64"], &d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    let limit = s["results"]["log_volume_limit"].as_f64().unwrap();
    assert!((limit - 1.418939).abs() < 1e-5);
    let ratio = s["results"]["ratio"].as_f64().unwrap();
    assert!(ratio > 0.0);
    let rows = csv_rows(&d.join("volume.csv"));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][3].parse::<f64>().unwrap() - 1.418939).abs() < 1e-5);
}

#[test]
fn uniform_power_catalog_values() {
    let d = scratch("rate");
    let o = run(&["rate", "--catalog", "uniform_power", "--grid", "0.25,0.5,1"], &d);
    assert!(o.status.success());
    let rows = csv_rows(&d.join("rate.csv"));
    let want = [4f64.ln(), 2f64.ln(), 0.0];
    for (row, w) in rows.iter().zip(want) {
        assert!((row[1].parse::<f64>().unwrap() - w).abs() < 1e-12);
    }
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (scratch("rep-a"), scratch("rep-b"));
    let args = ["sample", "--kind", "lp_ball", "--p", "1.5", "--n", "8", "--samples", "20", "--seed", "7"];
    assert!(run(&args, &a).status.success());
    assert!(run(&args, &b).status.success());
    assert_eq!(std::fs::read(a.join("sample.csv")).unwrap(), std::fs::read(b.join("sample.csv")).unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let (a, b) = (scratch("thr-1"), scratch("thr-8"));
    let args = ["verify", "--kind", "norm_lp", "--p", "2", "--level", "0.8", "--n-grid", "5,10,15", "--samples", "4000", "--seed", "3"];
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut eight = args.to_vec();
    eight.extend(["--threads", "8"]);
    assert!(run(&one, &a).status.success());
    assert!(run(&eight, &b).status.success());
    assert_eq!(std::fs::read(a.join("verify.csv")).unwrap(), std::fs::read(b.join("verify.csv")).unwrap());
}

#[test]
fn unknown_config_key_is_rejected() {
    let d = scratch("bad");
    let cfg = d.join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "rate", "catalog": "uniform_power", "grid": [0.5], "radius": 2}"#).unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("--output").arg(&d).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));
}

#[test]
fn missing_field_and_bad_domain_exit_2() {
    let d = scratch("domain");
    assert_eq!(run(&["rate", "--catalog", "gkr_lowp", "--grid", "1"], &d).status.code(), Some(2));
    assert_eq!(run(&["volume", "--m", "power:0.5", "--n", "4"], &d).status.code(), Some(2));
}

#[test]
fn summary_replays() {
    let (a, b) = (scratch("replay-a"), scratch("replay-b"));
    let o = run(&["verify", "--kind", "mdp", "--p", "2", "--q", "1", "--n", "500", "--samples", "1000", "--grid", "0.05,0.1", "--seed", "5"], &a);
    assert!(o.status.success());
    let o2 = bin().arg("--config").arg(a.join("verify.json")).arg("--output").arg(&b).output().unwrap();
    assert!(o2.status.success(), "{}", String::from_utf8_lossy(&o2.stderr));
    assert_eq!(std::fs::read(a.join("verify.csv")).unwrap(), std::fs::read(b.join("verify.csv")).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let d = scratch("override");
    let cfg = d.join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "rate", "catalog": "uniform_power", "grid": [0.5]}"#).unwrap();
    let o = bin().arg("--config").arg(&cfg).args(["--grid", "0.25"]).arg("--output").arg(&d).output().unwrap();
    assert!(o.status.success());
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((s["results"]["values"][0].as_f64().unwrap() - 4f64.ln()).abs() < 1e-12);
    assert_eq!(s["inputs"]["seed"], 0);
}
