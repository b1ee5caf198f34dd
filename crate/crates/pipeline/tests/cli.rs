use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resoloss")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/nbn_cpw.json").display().to_string()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["bogus"])), 1);
    assert_eq!(code(&run(&["--format", "xml", "xrd", "--two-theta", "35.73", "--hkl", "1,1,1"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["sweep", "x.csv"])), 3);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"material": {"tc_kelvin": 10.7, "typo": 1}}"#).unwrap();
    let o = run(&["--config", bad.to_str().unwrap(), "sweep", "x.csv"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
}

#[test]
fn input_and_fit_errors() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = dir.path().join("m.csv");
    std::fs::write(&malformed, "freq_hz,s21_re,s21_im\n1e9,1,0\n2e9,oops,0\n").unwrap();
    let o = run(&["fit", malformed.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("m.csv:3"));

    let flat = dir.path().join("flat.csv");
    let mut text = String::from("freq_hz,s21_re,s21_im\n");
    for i in 0..200 {
        text.push_str(&format!("{},1,0\n", 5.9e9 + 1e5 * i as f64));
    }
    std::fs::write(&flat, text).unwrap();
    assert_eq!(code(&run(&["fit", flat.to_str().unwrap()])), 2);

    assert_eq!(code(&run(&["xrd", "--two-theta", "190", "--hkl", "1,1,1"])), 1);
    assert_eq!(code(&run(&["xrd", "--two-theta", "35", "--hkl", "1,1"])), 1);
}

#[test]
fn xrd_and_photon_outputs() {
    let o = run(&["xrd", "--two-theta", "35.73", "--hkl", "1,1,1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["lattice_constant_angstrom"].as_f64().unwrap() - 4.35).abs() < 0.01);

    let o = run(&["--format", "csv", "photon", "--p-vna", "-25", "--p-att", "-110", "--qi", "1e5", "--qc", "5e6"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "-135");
}

#[test]
fn fit_synth_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--config", &config_path(), "--out", out, "--seed", "4", "synth"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let truth: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("injected.json")).unwrap()).unwrap();
    let o = run(&["fit", dir.path().join("s21_000.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let fit: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (q, q0) = (fit["qi"].as_f64().unwrap(), truth[0]["qi"].as_f64().unwrap());
    assert!((q / q0 - 1.0).abs() < 0.05, "{q} vs {q0}");
}

#[test]
fn mb_table() {
    let o = run(&["--config", &config_path(), "--format", "csv", "mb", "--t-min", "0.5", "--t-max", "3", "--points", "6"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 7);
    assert!(out.starts_with("temperature_K,sigma1_norm,"));
}

#[test]
fn dc_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rt.csv");
    let mut text = String::from("temperature_K,resistance_ohm\n");
    for i in 0..=600 {
        let t = 2.0 + 0.5 * i as f64;
        let r = if t < 10.7 { 0.0 } else { 159.5 };
        text.push_str(&format!("{t},{r}\n"));
    }
    std::fs::write(&path, text).unwrap();
    let o = run(&["dc", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["r_sq_tc_ohm"].as_f64().unwrap() - 159.5).abs() < 1e-9);
    assert!((v["rrr"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}
