use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use hotqubit::sweep::{best_case_t2, SweepSpec};
use hotqubit::SuperconductorMaterial;
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hotqubit"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn payload(dir: &Path, cmd: &str) -> Value {
    let text = fs::read_to_string(dir.join(format!("{cmd}.json"))).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["payload"].take()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn fixture_fit_recovers_t1() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["fit", fixture("t1_decay.csv").to_str().unwrap()],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let p = payload(tmp.path(), "fit");
    let t1 = num(&p["params"]["T1"]);
    assert!((t1 / 1e-6 - 1.0).abs() < 0.05, "T1 = {t1}");
    assert_eq!(p["converged"], Value::Bool(true));
    let curve = read_csv(&tmp.path().join("fit_curve.csv"));
    assert_eq!(curve[0], ["x", "y_data", "y_fit"]);
    assert_eq!(curve.len(), 21);
}

#[test]
fn malformed_csv_is_an_input_error_with_line() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(
        &bad,
        "# kind=decay, x_unit=s\nx,y\n0,1\n1e-7,0.9\n2e-7,zz\n3e-7,0.7\n",
    )
    .unwrap();
    let out = run(tmp.path(), &["fit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv:5"), "{err}");
}

#[test]
fn zero_amplitude_echo_is_a_model_failure() {
    let tmp = TempDir::new().unwrap();
    let flat = tmp.path().join("echo.csv");
    let mut text = String::from("# kind=echo, x_unit=s\nx,y\n");
    for i in 0..40 {
        text.push_str(&format!("{:e},0.5\n", i as f64 * 5e-8));
    }
    fs::write(&flat, text).unwrap();
    let out = run(tmp.path(), &["fit", flat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("low visibility"));
}

#[test]
fn missing_kind_and_unknown_keys_are_input_errors() {
    let tmp = TempDir::new().unwrap();
    let plain = tmp.path().join("plain.csv");
    fs::write(&plain, "x,y\n0,1\n1,0.5\n2,0.25\n3,0.1\n").unwrap();
    assert_eq!(
        run(tmp.path(), &["fit", plain.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    let out = run(
        tmp.path(),
        &["fit", "--kind", "decay", plain.to_str().unwrap()],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = run(tmp.path(), &["--set", "device.nonsense=1", "thermal"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(tmp.path(), &["--set", "device.t1_0_s=-1", "thermal"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t1_0_s"));
}

#[test]
fn thermal_table_properties() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), &["thermal"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = payload(tmp.path(), "thermal")["rows"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(num(&rows[0]["temperature_k"]), 0.0);
    assert_eq!(num(&rows[0]["n_th"]), 0.0);
    assert_eq!(num(&rows[0]["gamma_phi_per_s"]), 0.0);
    let g: Vec<f64> = rows.iter().map(|r| num(&r["gamma_phi_per_s"])).collect();
    assert!(g.windows(2).all(|w| w[1] >= w[0]));
    let at = |t: f64| {
        rows.iter()
            .find(|r| (num(&r["temperature_k"]) - t).abs() < 1e-12)
            .map(|r| num(&r["t2_s"]))
            .unwrap()
    };
    assert!((at(0.2) / at(0.08) - 1.0).abs() < 0.10);
    let csv = read_csv(&tmp.path().join("thermal.csv"));
    assert_eq!(csv[0], ["T", "T1_model", "T2_model", "Gamma_phi", "n_th"]);
    assert_eq!(csv.len(), rows.len() + 1);
}

#[test]
fn thermal_overlay_of_model_data_has_zero_residuals() {
    let tmp = TempDir::new().unwrap();
    run(tmp.path(), &["thermal", "--temps", "0.05,0.1,0.2,0.3"]);
    let rows = payload(tmp.path(), "thermal")["rows"]
        .as_array()
        .unwrap()
        .clone();
    let data = tmp.path().join("measured.csv");
    let mut text = String::from("T,T1,T2\n");
    for r in &rows {
        text.push_str(&format!(
            "{:?},{:?},{:?}\n",
            num(&r["temperature_k"]),
            num(&r["t1_s"]),
            num(&r["t2_s"])
        ));
    }
    fs::write(&data, text).unwrap();
    let out = run(
        tmp.path(),
        &["thermal", "--overlay", data.to_str().unwrap()],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let o = &payload(tmp.path(), "thermal")["overlay"];
    for p in o["points"].as_array().unwrap() {
        assert!(num(&p["t1_residual"]).abs() <= 1e-12);
        assert!(num(&p["t2_residual"]).abs() <= 1e-12);
    }
}

#[test]
fn chevron_matrix_is_symmetric_in_detuning_and_fast() {
    let tmp = TempDir::new().unwrap();
    let start = Instant::now();
    let out = run(
        tmp.path(),
        &[
            "--set",
            "pulse.swept={min=0.0, max=200e6, points=200}",
            "--set",
            "pulse.detuning_hz={min=-100e6, max=100e6, points=200}",
            "chevron",
        ],
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(elapsed < 10.0, "{elapsed} s");
    let m = read_csv(&tmp.path().join("chevron.csv"));
    assert_eq!((m.len(), m[0].len()), (201, 201));
    let body: Vec<Vec<f64>> = m[1..]
        .iter()
        .map(|r| r[1..].iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    for (i, row) in body.iter().enumerate().take(100) {
        for (a, b) in row.iter().zip(&body[199 - i]) {
            assert!((a - b).abs() < 1e-9);
        }
    }
    let p = payload(tmp.path(), "chevron");
    assert!(!p["contours"].as_array().unwrap().is_empty());
}

#[test]
fn one_cell_sweep_matches_scalar() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &[
            "--set",
            "sweep.f_hz=[40e9]",
            "--set",
            "sweep.t_k=[0.6]",
            "sweep",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = read_csv(&tmp.path().join("sweep.csv"));
    let cell: f64 = m[1][1].parse().unwrap();
    let spec = SweepSpec::new(
        vec![40e9],
        vec![0.6],
        3.0e6,
        SuperconductorMaterial::niobium(),
    )
    .unwrap();
    assert_eq!(cell, best_case_t2(40e9, 0.6, &spec).unwrap().t2);
    let p = payload(tmp.path(), "sweep");
    assert_eq!(num(&p["t2_s"][0][0]), cell);
}

#[test]
fn population_and_junction_outputs() {
    let tmp = TempDir::new().unwrap();
    let out = run(
        tmp.path(),
        &["population", "--pe", "1.7e-4", "--f-q", "21e9"],
    );
    assert!(out.status.success());
    let p = payload(tmp.path(), "population");
    assert!((num(&p["effective_temperature_k"]) - 0.116).abs() < 0.003);
    let out = run(
        tmp.path(),
        &["population", "--a-idle", "0", "--a-swapped", "1"],
    );
    assert_eq!(out.status.code(), Some(1));

    let exp = tmp.path().join("exposure.csv");
    let mut text = String::from("exposure,jc\n");
    for e in [10.0f64, 30.0, 100.0, 300.0, 1000.0] {
        text.push_str(&format!("{e},{:?}\n", 5000.0 * e.powf(-0.5)));
    }
    fs::write(&exp, text).unwrap();
    let out = run(
        tmp.path(),
        &[
            "junction",
            "--exposure",
            exp.to_str().unwrap(),
            "--t1",
            "1.6e-6",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let p = payload(tmp.path(), "junction");
    assert!((num(&p["exposure_fit"]["exponent"]) + 0.5).abs() < 1e-9);
    assert!(p["design"]["in_transmon_regime"].as_bool().unwrap());
}

#[test]
fn synth_is_seeded() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(
            tmp.path(),
            &[
                "--seed",
                "9",
                "synth",
                "--kind",
                "ramsey",
                "--points",
                "60",
                "-O",
                p.to_str().unwrap(),
            ],
        );
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let out = run(tmp.path(), &["fit", a.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn thread_count_env_is_validated() {
    let tmp = TempDir::new().unwrap();
    let out = bin()
        .env("HOTQUBIT_THREADS", "many")
        .arg("-o")
        .arg(tmp.path())
        .arg("thermal")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .env("HOTQUBIT_THREADS", "2")
        .arg("-o")
        .arg(tmp.path())
        .arg("thermal")
        .output()
        .unwrap();
    assert!(out.status.success());
}
