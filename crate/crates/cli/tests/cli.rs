use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::process::{Command, Output, Stdio};

use nrloop::gaussian::{entanglement_of, output_covariance, LogBase};
use nrloop::{LoopParams, ModePair};
use serde_json::Value;

fn nrloop(args: &[&str]) -> Output {
    nrloop_env(args, &[])
}

fn nrloop_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nrloop"));
    cmd.args(args).env_remove("NRLOOP_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = nrloop(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn records(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

/// `quantity,value` report as (key, remaining cells).
fn report(text: &str) -> Vec<(String, Vec<String>)> {
    records(text)
        .into_iter()
        .skip(1)
        .map(|mut cells| {
            let key = cells.remove(0);
            (key, cells)
        })
        .collect()
}

fn value(rep: &[(String, Vec<String>)], key: &str) -> String {
    rep.iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1[0]
        .clone()
}

fn num(rep: &[(String, Vec<String>)], key: &str) -> f64 {
    value(rep, key).parse().unwrap()
}

/// Sweep CSV as header plus rows of raw cells.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut all = records(text);
    let header = all.remove(0);
    (header, all)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn pump_plan_reference_modes() {
    let rep = report(&stdout_ok(&["plan-pumps", "--modes", "0.5,7.5,10.5"]));
    assert_eq!(num(&rep, "nu1"), 18.0);
    assert_eq!(num(&rep, "nu2"), 10.0);
    assert_eq!(num(&rep, "nu3"), 8.0);
    assert_eq!(num(&rep, "min_margin"), 0.5);
}

#[test]
fn pump_plan_rwa_and_amplitudes() {
    let rep = report(&stdout_ok(&[
        "plan-pumps",
        "--modes",
        "0.5,7.5,10.5",
        "--couplings",
        "0.003,0.003,0.003",
        "--c123",
        "1",
        "--pump-phases",
        "0,1.5707963267948966,0",
    ]));
    assert_eq!(value(&rep, "rwa_ok"), "true");
    assert_eq!(num(&rep, "alpha1"), 0.001);
    assert_eq!(num(&rep, "loop_phase"), FRAC_PI_2);
}

#[test]
fn colliding_pumps_fail_at_runtime() {
    let out = nrloop(&["plan-pumps", "--modes", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("collision"));
}

#[test]
fn stability_reference_point() {
    let rep = report(&stdout_ok(&["stability", "--c23", "0.5", "--c13", "1", "--phi", "1.5707963"]));
    assert_eq!(value(&rep, "stable"), "true");
    assert_eq!(value(&rep, "method"), "routh_hurwitz");
    let conditions: Vec<_> = rep.iter().filter(|(k, _)| k.starts_with("condition_")).collect();
    assert_eq!(conditions.len(), 3);
    assert!(conditions.iter().all(|(_, c)| c[2] == "true"));
    let past = report(&stdout_ok(&["stability", "--c23", "1.2", "--c13", "1", "--phi", "pi/2"]));
    assert_eq!(value(&past, "stable"), "false");
}

#[test]
fn stability_random_cross_check() {
    let rep = report(&stdout_ok(&["stability", "--random", "300", "--seed", "11"]));
    assert_eq!(value(&rep, "disagreements"), "0");
    assert_eq!(value(&rep, "samples"), "300");
}

#[test]
fn swap_reference_point() {
    let rep = report(&stdout_ok(&["swap", "--ca", "0.5", "--cb", "0.5"]));
    let expected = 2.0 * (8.0f64 / 9.0).atanh();
    assert!((num(&rep, "log_negativity[ln]") - expected).abs() < 1e-12);
    assert!((expected - 2.833).abs() < 1e-3);
    assert_eq!(num(&rep, "purity"), 1.0);
    let bits = report(&stdout_ok(&["swap", "--ca", "0.5", "--cb", "0.5", "--log-base", "2"]));
    assert!((num(&bits, "log_negativity[log2]") - expected / 2f64.ln()).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    let out = nrloop(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(nrloop(&["swap", "--ca", "1.5", "--cb", "0.5"]).status.code(), Some(2));
    assert_eq!(nrloop(&["run"]).status.code(), Some(2));
    assert_eq!(nrloop(&["sweep-phase", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(nrloop(&["sweep-phase", "--metrics", "en_99"]).status.code(), Some(2));
    assert_eq!(
        nrloop_env(&["sweep-phase"], &[("NRLOOP_THREADS", "zero")]).status.code(),
        Some(2)
    );
}

#[test]
fn invalid_config_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"system\": \"nrl\",\n  \"params\": {\n    \"c23\": 0.5,\n    \"gamma\": 1\n  }\n}\n").unwrap();
    let out = nrloop(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:5:"), "{err}");
    assert!(err.contains("gamma"), "{err}");
}

#[test]
fn config_from_stdin_with_flag_override() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nrloop"))
        .args(["run", "--config", "-", "--c23", "0.5", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"params": {"c23": 0.3}, "outputs": ["en_12"]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["params"]["c23"], 0.5);
    let e = v["rows"][0][0].as_f64().unwrap();
    assert!((e - 2.0 * 3f64.acosh()).abs() < 1e-9);
}

#[test]
fn phase_sweep_reproduces_closed_forms() {
    let (h, rows) = table(&stdout_ok(&["sweep-phase", "--c23", "0.5", "--c13", "1"]));
    assert_eq!(h, ["phi[rad]", "en_12[ln]", "en_23[ln]", "mu_12", "mu_23"]);
    assert_eq!(rows.len(), 73);
    let phi = column(&h, &rows, "phi[rad]");
    let e12 = column(&h, &rows, "en_12[ln]");
    let e23 = column(&h, &rows, "en_23[ln]");
    let mu12 = column(&h, &rows, "mu_12");
    let mu23 = column(&h, &rows, "mu_23");
    let at = |x: f64| phi.iter().position(|p| (p - x).abs() < 1e-12).unwrap();
    let (plus, minus) = (at(FRAC_PI_2), at(-FRAC_PI_2));
    let peak = 2.0 * 3f64.acosh();
    assert!((e12[plus] - peak).abs() < 1e-9);
    assert_eq!(e12[minus], 0.0);
    assert_eq!(e23[plus], 0.0);
    assert!((mu12[plus] - 1.0).abs() < 1e-9);
    assert!((mu23[minus] - 1.0).abs() < 1e-9);
    let argmax = (0..e12.len()).max_by(|&a, &b| e12[a].total_cmp(&e12[b])).unwrap();
    assert_eq!(argmax, plus);
    assert_eq!(phi[0], -PI);
    assert_eq!(phi[72], PI);
}

#[test]
fn thermal_sweep_nrl_flat_tms_decreasing() {
    let (h, rows) = table(&stdout_ok(&["sweep-thermal", "--c23", "0.5", "--c13", "1"]));
    assert_eq!(rows.len(), 21);
    let nrl = column(&h, &rows, "en_12[ln]");
    let tms = column(&h, &rows, "tms_en_12[ln]");
    let peak = 2.0 * 3f64.acosh();
    assert!(nrl.iter().all(|e| (e - peak).abs() < 1e-9));
    assert!((tms[0] - peak).abs() < 1e-9);
    assert!(tms.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn loss_grid_is_flat_along_mode_three() {
    let (h, rows) = table(&stdout_ok(&["sweep-loss"]));
    assert_eq!(rows.len(), 36);
    let l1 = column(&h, &rows, "loss1");
    let e = column(&h, &rows, "en_12[ln]");
    let mu = column(&h, &rows, "mu_12");
    for i in 0..rows.len() {
        let first = i - i % 6;
        assert_eq!(l1[i], l1[first]);
        assert!((e[i] - e[first]).abs() < 1e-9, "row {i}");
        assert!((mu[i] - mu[first]).abs() < 1e-9, "row {i}");
    }
    assert!(e[6] < e[0]);
}

#[test]
fn frequency_sweep_off_resonance() {
    let (h, rows) = table(&stdout_ok(&["sweep-freq", "--steps", "7", "--from", "-1.5", "--to", "1.5"]));
    let omega = column(&h, &rows, "omega");
    let e = column(&h, &rows, "en_12[ln]");
    let nr = column(&h, &rows, "nr_12");
    assert_eq!(omega[3], 0.0);
    assert!((e[3] - 2.0 * 3f64.acosh()).abs() < 1e-9);
    assert!(e.iter().all(|&x| x < e[3] + 1e-12));
    assert!(nr.iter().all(|n| (0.0..=1.0).contains(n)));
    assert!((nr[3] - 1.0).abs() < 1e-12);
    // a real-valued spectrum is symmetric in ω
    for k in 0..3 {
        assert!((e[k] - e[6 - k]).abs() < 1e-9);
    }
}

#[test]
fn unstable_points_emit_sentinels() {
    let out = stdout_ok(&["sweep-phase", "--c23", "1.5", "--steps", "3", "--metrics", "en_12,stable,nr_12"]);
    let (_, rows) = table(&out);
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(&r[1..], ["unstable", "false", "unstable"]);
    }
}

#[test]
fn csv_dialect() {
    let out = stdout_ok(&["sweep-phase", "--steps", "9"]);
    assert!(!out.contains('\r'));
    assert!(out.ends_with('\n'));
    let (h, rows) = table(&out);
    for r in &rows {
        assert_eq!(r.len(), h.len());
        for c in r {
            let x: f64 = c.parse().unwrap();
            assert!(x.is_finite());
            let mantissa = c.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{c}");
        }
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["sweep-loss", "--steps", "5", "--metrics", "en_12,mu_12,en_23,nu_13,refl_2"];
    let one = nrloop_env(&args, &[("NRLOOP_THREADS", "1")]);
    let four = nrloop_env(&args, &[("NRLOOP_THREADS", "4")]);
    let default = nrloop(&args);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);
}

#[test]
fn phase_in_degrees_matches_radians() {
    let a = stdout_ok(&["stability", "--phi-deg", "90"]);
    let b = stdout_ok(&["stability", "--phi", "pi/2"]);
    assert_eq!(a, b);
}

#[test]
fn json_round_trips_bit_exactly() {
    let args = ["sweep-phase", "--steps", "13", "--c23", "0.4", "--c13", "1.7", "--format", "json"];
    let first: Value = serde_json::from_str(&stdout_ok(&args)).unwrap();
    // re-ingest the echoed config as a fixture
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixture.json");
    std::fs::write(&path, serde_json::to_string(&first["config"]).unwrap()).unwrap();
    let second: Value = serde_json::from_str(&stdout_ok(&["run", "--config", path.to_str().unwrap()])).unwrap();
    assert_eq!(first["rows"], second["rows"]);
    assert_eq!(first["columns"], second["columns"]);

    // and the parsed numbers are exactly what the library computes
    let cols: Vec<&str> = first["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    for row in first["rows"].as_array().unwrap() {
        let phi = row[0].as_f64().unwrap();
        let p = LoopParams::nrl_matched(0.4, 1.7, phi).unwrap();
        let v = output_covariance(&p, 0.0).unwrap();
        for (i, name) in cols.iter().enumerate().skip(1) {
            let pair = if name.ends_with("12") { ModePair(1, 2) } else { ModePair(2, 3) };
            let r = entanglement_of(&v, pair, LogBase::E).unwrap();
            let expected = if name.starts_with("en") { r.log_negativity } else { r.purity };
            assert_eq!(row[i].as_f64().unwrap().to_bits(), expected.to_bits(), "{name} at {phi}");
        }
    }
}

#[test]
fn decompose_matches_prediction() {
    let rep = report(&stdout_ok(&["decompose", "--c23", "0.4", "--c13", "1.7", "--phi", "-pi/2"]));
    assert_eq!(value(&rep, "left.factor_match"), "true");
    assert_eq!(value(&rep, "left.predicted"), "-S = R(2,3) U(1,3)");
    assert!(num(&rep, "left.reconstruction_residual") < 1e-12);
    assert!(rep.iter().all(|(k, _)| !k.starts_with("right.")));
    let r_rows = rep.iter().filter(|(k, _)| k.starts_with("left.R[")).count();
    assert_eq!(r_rows, 6);
    let both = report(&stdout_ok(&["decompose", "--c23", "0.5", "--c13", "1", "--phi", "pi/2", "--side", "both"]));
    assert_eq!(value(&both, "left.factor_match"), "true");
    assert_eq!(value(&both, "right.factor_match"), "true");
}

#[test]
fn run_with_grid_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tms.json");
    std::fs::write(
        &path,
        r#"{
  "system": "tms",
  "params": {"c12": 0.5},
  "sweep": [
    {"axis": "n1", "from": 0, "to": 1, "steps": 2},
    {"axis": "n2", "from": 0, "to": 10, "steps": 3}
  ],
  "outputs": ["mu_12"]
}"#,
    )
    .unwrap();
    let (h, rows) = table(&stdout_ok(&["run", "--config", path.to_str().unwrap()]));
    assert_eq!(h, ["n1", "n2", "mu_12"]);
    assert_eq!(rows.len(), 6);
    let n1 = column(&h, &rows, "n1");
    let n2 = column(&h, &rows, "n2");
    let mu = column(&h, &rows, "mu_12");
    for i in 0..6 {
        let expected = 1.0 / ((2.0 * n1[i] + 1.0) * (2.0 * n2[i] + 1.0));
        assert!((mu[i] - expected).abs() < 1e-10);
    }
}
