use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(dir: &Path, config: &str) -> (i32, Value) {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_wavetail"))
        .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "2"])
        .output()
        .unwrap();
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    (status.status.code().unwrap(), serde_json::from_str(&manifest).unwrap())
}

#[test]
fn exponent_out_of_range_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(dir.path(), r#"{"task":"spectral","lambdas":[0.5],"potential":{"kind":"inverse_power","alpha":5}}"#);
    assert_eq!(code, 3);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error_code"], "HYPOTHESIS_RANGE");
}

#[test]
fn unknown_key_exits_2_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(dir.path(), r#"{"task":"verify","suite":"free","verbosity":3}"#);
    assert_eq!(code, 2);
    assert_eq!(m["error_code"], "CONFIG");
    assert_eq!(m["config"]["verbosity"], 3);
}

#[test]
fn bad_suite_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_wavetail"))
        .args(["--suite", "everything", "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn free_evolution_writes_spectral_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "task": "evolve",
        "potential": {"kind": "zero"},
        "data": {"f": {"kind": "zero"}, "g": {"kind": "gaussian", "center": 0.0, "sigma": 1.0, "amplitude": 1.0}},
        "observer_x": 1.0,
        "times": {"start": 1.0, "end": 5.0, "count": 5}
    }"#;
    let (code, m) = run(dir.path(), cfg);
    assert_eq!(code, 0, "{m}");
    assert_eq!(m["status"], "ok");
    assert!(m["model_hash"].as_str().unwrap().len() == 64);
    let csv = fs::read_to_string(dir.path().join("out/evolution.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("spectral")));
    // 1D free wave with f = 0: ψ(t,x) = ½∫_{x-t}^{x+t} g
    let psi: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    let exact = 0.5 * (std::f64::consts::PI / 2.0).sqrt() * (libm::erf(3.0 / 2f64.sqrt()) + libm::erf(1.0 / 2f64.sqrt()));
    assert!((psi - exact).abs() < 1e-6 * exact, "{psi} vs {exact}");
}

#[test]
fn fit_task_recovers_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let mut series = String::from("t,psi\n");
    for i in 0..400 {
        let t = 100.0 * 10f64.powf(i as f64 / 200.0);
        series.push_str(&format!("{t:.16e},{:.16e}\n", -2.5 * t.powf(-3.2)));
    }
    fs::write(dir.path().join("series.csv"), series).unwrap();
    let cfg = format!(
        r#"{{"task":"fit","series":"{}","window":[200.0,5000.0]}}"#,
        dir.path().join("series.csv").display()
    );
    let (code, _) = run(dir.path(), &cfg);
    assert_eq!(code, 0);
    let fit: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/fit.json")).unwrap()).unwrap();
    assert!((fit["exponent"].as_f64().unwrap() - 3.2).abs() < 1e-9);
    assert_eq!(fit["reliable"], true);
}
