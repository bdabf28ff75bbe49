// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use qbattery_cli::table::Cell;
use qbattery_cli::{read_table, ExperimentConfig, RunError};
use serde_json::{json, Value};

fn qbattery(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbattery")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn undriven_trace_has_zero_work() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "experiment": "trace",
        "model": {"kind": "LrXY", "N": 6, "h_z": 1.0, "J": 0.0, "gamma": -1.0, "alpha": 1.0, "Z": 3},
        "drive": {"period": 0.7, "n_max": 40}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out_dir = dir.path().join("out");
    let out = qbattery(&["run", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = read_table(&out_dir.join("trace.csv")).unwrap();
    assert_eq!(t.columns, ["n", "t", "W", "P_avg"]);
    assert_eq!(t.rows.len(), 41);
    assert!(t.floats("W").unwrap().iter().all(|w| w.abs() < 1e-10));
    let manifest: Value = serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "trace");
    assert_eq!(manifest["config"]["model"]["N"], 6);
    assert!(manifest["wall_clock_seconds"].is_number());
    assert!(manifest["library_version"].is_string());
}

#[test]
fn omega_scan_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "experiment": "omega_scan",
        "model": {"kind": "NNN", "N": 6, "h_z": 0.5, "J": 1.0, "J2": 0.5, "gamma": -1.0},
        "omega_grid": {"min": 0.5, "max": 50.0, "count": 24},
        "drive": {"omega": 1.0, "n_max": 120}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let out = qbattery(&["run", &path, "--out", out_dir.to_str().unwrap(), "--threads", threads]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            std::fs::read(out_dir.join("omega_scan.csv")).unwrap(),
            std::fs::read(out_dir.join("best.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(!outputs[0].0.contains(&b'\r'));
    let t = qbattery_cli::Table::from_csv(&outputs[0].0).unwrap();
    assert_eq!(t.rows.len(), 24);
}

#[test]
fn scaling_then_fit_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "experiment": "scaling",
        "model": {"kind": "LMG", "h_z": 1.0, "J": 20.0, "gamma": -1.0},
        "N_list": [4, 6, 8, 10, 12],
        "omega_grid": {"min": 0.1, "max": 100.0, "count": 40},
        "output": {"format": "csv"}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out_dir = dir.path().join("out");
    let out = qbattery(&["run", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let data = read_table(&out_dir.join("scaling.csv")).unwrap();
    assert_eq!(data.columns, ["N", "omega_star", "n_star", "P_max", "W_max"]);
    assert_eq!(data.rows.len(), 5);
    let fit = read_table(&out_dir.join("fit.csv")).unwrap();
    assert_eq!(fit.columns, ["model", "a", "b", "eta", "mse_percent"]);
    assert_eq!(fit.rows[0][0], Cell::Text("powerlaw".into()));
    assert_eq!(fit.rows[1][0], Cell::Text("linear".into()));

    let csv = out_dir.join("scaling.csv");
    let out = qbattery(&["fit", csv.to_str().unwrap(), "--model", "powerlaw"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let eta_table = fit.floats("eta").unwrap()[0];
    assert_eq!(v["eta"].as_f64().unwrap().to_bits(), eta_table.to_bits());
    let out = qbattery(&["fit", csv.to_str().unwrap(), "--model", "linear", "--y", "W_max"]);
    assert!(out.status.success());
}

#[test]
fn json_output_keeps_column_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "experiment": "bound",
        "model": {"kind": "LMG", "h_z": 1.0, "J": 1.0, "gamma": -1.0},
        "N_list": [4, 5, 6, 7],
        "drive": {"period": 0.2, "n_max": 50},
        "output": {"format": "json"}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out_dir = dir.path().join("out");
    let out = qbattery(&["run", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(out_dir.join("bound.json")).unwrap();
    let rows: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 4);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "N");
    assert_eq!(keys[5], "total");
    assert!(rows.as_array().unwrap().iter().all(|r| r["max_ratio"].as_f64().unwrap() < 1.0));
    assert!(out_dir.join("fit.json").exists());
}

#[test]
fn bad_configs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = json!({
        "experiment": "scaling",
        "model": {"kind": "LMG", "h_z": 1.0, "J": 20.0, "gamma": -1.0},
        "N_list": [4, 6],
        "speed": "fast"
    });
    let path = write_config(dir.path(), "u.json", &unknown);
    for cmd in ["run", "validate"] {
        let out = qbattery(&[cmd, &path]);
        assert_eq!(out.status.code(), Some(2));
        assert_eq!(stderr_json(&out)["error"], "config");
    }

    let good = json!({
        "experiment": "scaling",
        "model": {"kind": "LMG", "h_z": 1.0, "J": 20.0, "gamma": -1.0},
        "N_list": [4, 6]
    });
    let path = write_config(dir.path(), "g.json", &good);
    let out = qbattery(&["validate", &path]);
    assert!(out.status.success());
    let out = qbattery(&["run", &path, "--engine", "FreeFermion", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("engine"));

    let out = qbattery(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = qbattery(&["run"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_violations_map_to_exit_three() {
    let e = RunError::from(qbattery::Error::InvariantViolation("bound".into()));
    assert_eq!(e.exit_code(), 3);
    assert_eq!(RunError::from(qbattery::Error::Domain("x".into())).exit_code(), 2);
    let v: Value = serde_json::from_str(&e.to_json()).unwrap();
    assert_eq!(v["error"], "invariant_violation");
}

#[test]
fn schema_lists_every_config_key() {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/experiment.schema.json")).expect("schema is JSON");
    let full = json!({
        "experiment": "z_sweep",
        "model": {"kind": "LrXY", "N": 6, "h_z": 0.5, "J": 5.0, "J2": 0.0, "gamma": -1.0, "alpha": 0.5, "Z": 2,
                  "lmg_prefactor": "KacConsistent"},
        "drive": {"omega": 2.0, "n_max": 100},
        "beta": 2.0,
        "omega_grid": {"min": 0.1, "max": 10.0, "count": 5, "spacing": "log"},
        "N_list": [4, 6],
        "sweep": {"values": [2, "max"], "hold_amplitude_sum": false},
        "normalize_work": false,
        "output": {"path": "out", "format": "csv"},
        "engine": "ED",
        "threads": 1
    });
    ExperimentConfig::from_json(&full.to_string()).unwrap();
    let props = &schema["properties"];
    for (k, v) in full.as_object().unwrap() {
        assert!(props.get(k).is_some(), "schema misses {k}");
        if let Some(obj) = v.as_object() {
            for sub in obj.keys() {
                assert!(props[k]["properties"].get(sub).is_some(), "schema misses {k}.{sub}");
            }
        }
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = qbattery(&["validate", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        count += 1;
    }
    assert!(count >= 9);
}
