//! End-to-end contract tests for the `spiralsheet` binary.

use serde_json::Value;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spiralsheet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, name: &str, a: f64, mu: f64, g: &[f64], theta: &[f64]) -> String {
    let path = dir.join(name);
    let cfg = serde_json::json!({"a": a, "mu": mu, "g": g, "theta": theta});
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_alexander_known_values() {
    let out = run(&["solve", "alexander", "--a", "1", "--M", "1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["family"]["g"][0].as_f64().unwrap() - PI.tanh()).abs() < 1e-9);
    assert!(v["family"]["mu"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["residual_max"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["compat_holds"], Value::Bool(false));

    let out2 = run(&["solve", "alexander", "--a", "1", "--M", "2"]);
    let v2 = stdout_json(&out2);
    assert!((v2["family"]["g"][0].as_f64().unwrap() - (PI / 2.0).tanh().recip()).abs() < 1e-9);

    let out3 = run(&["solve", "alexander", "--a", "1", "--M", "3"]);
    let v3 = stdout_json(&out3);
    assert_eq!(v3["compat_holds"], Value::Bool(true));
}

#[test]
fn solve_general_converges_and_guards_gauge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "init.json", 1.0, 0.3, &[0.5], &[0.0]);
    let out = run(&["solve", "general", "--config", &cfg, "--free", "mu,g0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["residual_max"].as_f64().unwrap() < 1e-12);
    assert!((v["family"]["g"][0].as_f64().unwrap() - PI.tanh()).abs() < 1e-8);

    let gauge = run(&["solve", "general", "--config", &cfg, "--free", "theta0"]);
    assert_eq!(gauge.status.code(), Some(1));

    // nothing free and not a solution: solver failure
    let stuck = run(&["solve", "general", "--config", &cfg, "--free", ""]);
    assert_eq!(stuck.status.code(), Some(1)); // empty token is a usage error
    let cfg2 = write_config(dir.path(), "init2.json", 1.0, 0.3, &[0.5], &[0.0]);
    let mut none = bin();
    let no_free = none
        .args(["solve", "general", "--config", &cfg2, "--max-iter", "3", "--free", "g0"])
        .output()
        .unwrap();
    assert_eq!(no_free.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let bad = run(&["solve", "alexander", "--a", "1", "--nope", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let missing = run(&["verify", "--config", "/nonexistent/file.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_matching_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let solved = write_config(dir.path(), "solved.json", 1.0, 0.0, &[PI.tanh()], &[0.0]);
    let out = run(&["verify", "--config", &solved, "--suite", "matching"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let perturbed = write_config(dir.path(), "mu01.json", 1.0, 0.1, &[PI.tanh()], &[0.0]);
    let out2 = run(&["verify", "--config", &perturbed, "--suite", "matching"]);
    assert_eq!(out2.status.code(), Some(3));
    let v = stdout_json(&out2);
    let vel = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "matching_velocity")
        .unwrap();
    let res = vel["max_residual"].as_f64().unwrap();
    assert!((res - 0.1).abs() < 1e-6, "residual {res}");
}

#[test]
fn verify_oracle_skips_biot_savart_for_incompatible_family() {
    let dir = tempfile::tempdir().unwrap();
    // solved M=2 Alexander family: weak solution, but compat fails
    let g = (PI / 2.0).tanh().recip();
    let cfg = write_config(dir.path(), "m2.json", 1.0, 0.0, &[g, g], &[0.0, PI]);
    let out = run(&["verify", "--config", &cfg, "--suite", "oracle"]);
    let v = stdout_json(&out);
    let bs = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "biot_savart")
        .unwrap();
    assert!(bs["skipped"].as_str().unwrap().contains("compatibility"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.json", 1.0, 0.0, &[PI.tanh()], &[0.0]);
    let a = run(&["verify", "--config", &cfg, "--suite", "winding", "--seed", "42"]);
    let b = run(&["verify", "--config", &cfg, "--suite", "winding", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sample_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.json", 1.0, 0.0, &[PI.tanh()], &[0.0]);
    let out_path = dir.path().join("grid.csv");
    let out = run(&[
        "sample", "--config", &cfg, "--t", "1", "--bounds", "1,2,1,2",
        "--nx", "2", "--ny", "2", "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.trim_end().lines().collect();
    assert_eq!(lines[0], "x,y,u,v,p,region");
    assert_eq!(lines.len(), 5);
    // first node (1,1): match the library values
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 6);
    let (u, v): (f64, f64) = (fields[2].parse().unwrap(), fields[3].parse().unwrap());
    let fam = spiral_sheet::SpiralFamily::new(spiral_sheet::FamilyConfig {
        a: 1.0,
        mu: 0.0,
        g: vec![PI.tanh()],
        theta: vec![0.0],
    })
    .unwrap();
    let (w, _) =
        spiral_sheet::field::spacetime_fields(&fam, num_complex::Complex64::new(1.0, 1.0), 1.0)
            .unwrap();
    assert!((u - w.re).abs() < 1e-15 && (v - w.im).abs() < 1e-15);

    // a node exactly on the sheet gets NaN fields and region -1
    let on = dir.path().join("on.csv");
    let out2 = run(&[
        "sample", "--config", &cfg, "--t", "1", "--bounds", "1,2,0,1",
        "--nx", "2", "--ny", "2", "--out", on.to_str().unwrap(),
    ]);
    assert!(out2.status.success());
    let csv2 = std::fs::read_to_string(&on).unwrap();
    let row: Vec<&str> = csv2.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[5], "-1");
    assert_eq!(row[2], "NaN");

    let bad = run(&[
        "sample", "--config", &cfg, "--t", "1", "--bounds", "2,1,0,1",
        "--nx", "2", "--ny", "2", "--out", on.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn energy_scaling_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.json", 1.0, 0.0, &[PI.tanh()], &[0.0]);
    let e1 = stdout_json(&run(&["energy", "--config", &cfg, "--r", "1"]));
    let e2 = stdout_json(&run(&["energy", "--config", &cfg, "--r", "2"]));
    let (v1, v2) = (e1["E"].as_f64().unwrap(), e2["E"].as_f64().unwrap());
    assert!((v2 / v1 - 16.0).abs() < 1e-10 * 16.0);
    assert!(
        (e1["C"].as_f64().unwrap() - e2["C"].as_f64().unwrap()).abs()
            < 1e-10 * e1["C"].as_f64().unwrap()
    );
    let zero = run(&["energy", "--config", &cfg, "--r", "0"]);
    assert_eq!(zero.status.code(), Some(1));
}
