// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Dispatch of each experiment kind to the library and assembly of its
//! output tables.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qbattery::bounds::{bound_dominance_check, bound_scaling_fit, power_bound};
use qbattery::fitting::{fit_linear, fit_power_law, FitResult};
use qbattery::floquet::{evolve_trace, half_step_unitaries};
use qbattery::magnus::{effective_evolution, fme_terms};
use qbattery::models::{initial_state, Basis, ModelKind};
use qbattery::observables::{max_power_over_n, max_work_over_n, scan_omega, work_trace, ScanOptions};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig, SweepValue};
use crate::table::{emit_table, Cell, Table};
use crate::RunError;

pub const SCALING_COLUMNS: [&str; 5] = ["N", "omega_star", "n_star", "P_max", "W_max"];
pub const FIT_COLUMNS: [&str; 5] = ["model", "a", "b", "eta", "mse_percent"];

fn scan_options(cfg: &ExperimentConfig) -> ScanOptions {
    ScanOptions { beta: cfg.beta(), n_max: cfg.n_max(), normalize_work: cfg.normalize_work }
}

fn sweep_cell(v: SweepValue) -> Cell {
    match v {
        SweepValue::Number(x) => Cell::Float(x),
        SweepValue::Keyword(_) => Cell::Text("max".into()),
    }
}

/// One row of a scaling table: the optimum over the ω grid at size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub omega_star: f64,
    pub n_star: usize,
    pub p_max: f64,
    /// `max_n W(nT)` at `ω*`.
    pub w_max: f64,
}

fn scaling_points(cfg: &ExperimentConfig, sweep: Option<SweepValue>) -> Result<Vec<ScalingPoint>, RunError> {
    let omegas = cfg.omegas()?;
    let opts = scan_options(cfg);
    let engine = cfg.engine();
    cfg.sizes()?
        .par_iter()
        .map(|&n| {
            let model = cfg.model_at(n, sweep)?;
            let best = scan_omega(&model, &omegas, engine, &opts)?.best;
            let trace = work_trace(&model, 2.0 * std::f64::consts::PI / best.omega, engine, &opts)?;
            let (_, w_max) = max_work_over_n(&trace)?;
            Ok(ScalingPoint { n, omega_star: best.omega, n_star: best.n_star, p_max: best.power, w_max })
        })
        .collect()
}

fn fits(points: &[(f64, f64)]) -> Result<Vec<(&'static str, FitResult)>, RunError> {
    let mut out = Vec::new();
    if points.len() >= 4 {
        out.push(("powerlaw", fit_power_law(points)?));
    }
    if points.len() >= 2 {
        out.push(("linear", fit_linear(points)?));
    }
    Ok(out)
}

fn fit_row(prefix: &[Cell], name: &str, f: &FitResult) -> Vec<Cell> {
    let mut row = prefix.to_vec();
    row.extend([name.into(), f.a.into(), f.b.into(), f.eta.into(), f.mse_percent.into()]);
    row
}

fn with_prefix(prefix: Option<&str>, cols: &[&str]) -> Table {
    let mut all: Vec<&str> = prefix.into_iter().collect();
    all.extend_from_slice(cols);
    Table::new(&all)
}

fn scaling_tables(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    let var = cfg.experiment.sweep_variable();
    let values: Vec<Option<SweepValue>> = match var {
        Some(_) => cfg.sweep_values()?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut data = with_prefix(var, &SCALING_COLUMNS);
    let mut fit = with_prefix(var, &FIT_COLUMNS);
    for v in values {
        let prefix: Vec<Cell> = v.map(sweep_cell).into_iter().collect();
        let points = scaling_points(cfg, v)?;
        for p in &points {
            let mut row = prefix.clone();
            row.extend([p.n.into(), p.omega_star.into(), p.n_star.into(), p.p_max.into(), p.w_max.into()]);
            data.push(row);
        }
        let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.p_max)).collect();
        for (name, f) in fits(&xy)? {
            fit.push(fit_row(&prefix, name, &f));
        }
    }
    Ok(vec![(cfg.experiment.name().to_string(), data), ("fit".to_string(), fit)])
}

fn trace_table(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    let n = cfg.sizes()?[0];
    let model = cfg.model_at(n, None)?;
    let drive = cfg.drive_spec()?;
    let trace = work_trace(&model, drive.period, cfg.engine(), &scan_options(cfg))?;
    let mut t = Table::new(&["n", "t", "W", "P_avg"]);
    for (k, w, p) in trace.entries() {
        t.push(vec![k.into(), (k as f64 * drive.period).into(), w.into(), p.into()]);
    }
    Ok(vec![("trace".into(), t)])
}

fn omega_scan_table(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    let n = cfg.sizes()?[0];
    let model = cfg.model_at(n, None)?;
    let scan = scan_omega(&model, &cfg.omegas()?, cfg.engine(), &scan_options(cfg))?;
    let mut t = Table::new(&["omega", "n_star", "P_max"]);
    for p in &scan.points {
        t.push(vec![p.omega.into(), p.n_star.into(), p.power.into()]);
    }
    let mut best = Table::new(&["N", "omega_star", "n_star", "P_max"]);
    best.push(vec![n.into(), scan.best.omega.into(), scan.best.n_star.into(), scan.best.power.into()]);
    Ok(vec![("omega_scan".into(), t), ("best".into(), best)])
}

fn bound_tables(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    let drive = cfg.drive_spec()?;
    let sizes = cfg.sizes()?;
    let rows = sizes
        .par_iter()
        .map(|&n| {
            let b = power_bound(n, drive.period)?;
            let model = cfg.model_at(n, None)?;
            let checkable = matches!(model.kind, ModelKind::LrXY | ModelKind::Lmg) && model.h_z == 1.0 && model.j == 1.0;
            let (p, n_at, ratio) = if checkable {
                let r = bound_dominance_check(&model, drive.period, drive.n_max)?;
                (r.max_power, Cell::from(r.n_at_max), r.max_ratio)
            } else {
                (f64::NAN, Cell::Float(f64::NAN), f64::NAN)
            };
            Ok(vec![
                n.into(),
                drive.period.into(),
                b.term_a.into(),
                b.term_b_linear.into(),
                b.term_b_quadratic.into(),
                b.total.into(),
                b.truncation_error_estimate.into(),
                p.into(),
                n_at,
                ratio.into(),
            ])
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut t = Table::new(&[
        "N",
        "T",
        "term_A",
        "term_B_linear",
        "term_B_quadratic",
        "total",
        "truncation_error_estimate",
        "max_P_ins",
        "n_at_max",
        "max_ratio",
    ]);
    for r in rows {
        t.push(r);
    }
    let mut out = vec![("bound".to_string(), t)];
    if sizes.len() >= 4 {
        let mut fit = Table::new(&FIT_COLUMNS);
        fit.push(fit_row(&[], "powerlaw", &bound_scaling_fit(&sizes, drive.period)?));
        out.push(("fit".into(), fit));
    }
    Ok(out)
}

fn fme_table(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    let omegas = cfg.omegas()?;
    let n_max = cfg.n_max();
    let beta = cfg.beta();
    let mut jobs = Vec::new();
    for &n in &cfg.sizes()? {
        for &w in &omegas {
            jobs.push((n, w));
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(n, omega)| {
            let model = cfg.model_at(n, None)?;
            let basis = if beta.is_infinite() { Basis::polarized_sector(n) } else { Basis::full(n) };
            let h_b = model.battery(&basis)?;
            let rho0 = initial_state(&h_b, beta)?;
            let t = 2.0 * std::f64::consts::PI / omega;
            let exact = evolve_trace(&half_step_unitaries(&h_b, &model.interaction(1.0, &basis)?, t)?, &rho0, &h_b, n_max)?;
            let (_, p_exact) = max_power_over_n(&exact)?;
            let w_scale = exact.work().iter().fold(0.0_f64, |a, w| a.max(w.abs()));
            let terms = fme_terms(&model, t, &basis)?;
            (0..=3)
                .map(|order| {
                    let fme = effective_evolution(&terms, order, &rho0, &h_b, n_max)?;
                    let err = exact.work().iter().zip(fme.work()).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
                    let (_, p_fme) = max_power_over_n(&fme)?;
                    let rel = if w_scale > 0.0 { err / w_scale } else { 0.0 };
                    Ok(vec![
                        n.into(),
                        omega.into(),
                        order.into(),
                        err.into(),
                        rel.into(),
                        p_exact.into(),
                        p_fme.into(),
                    ])
                })
                .collect::<Result<Vec<_>, RunError>>()
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut t = Table::new(&["N", "omega", "order", "max_abs_dW", "relative_error", "P_max_exact", "P_max_fme"]);
    for r in rows.into_iter().flatten() {
        t.push(r);
    }
    Ok(vec![("fme_compare".into(), t)])
}

/// Runs the experiment in the current thread pool and returns its tables in
/// a fixed order. No files are written.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Trace => trace_table(cfg),
        Experiment::OmegaScan => omega_scan_table(cfg),
        Experiment::Scaling
        | Experiment::GammaSweep
        | Experiment::AlphaSweep
        | Experiment::ZSweep
        | Experiment::NnnSweep => scaling_tables(cfg),
        Experiment::Bound => bound_tables(cfg),
        Experiment::FmeCompare => fme_table(cfg),
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub outputs: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Runs `cfg` on `threads` workers (default: all cores) and writes one file
/// per table plus `manifest.json` into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let threads = cfg.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Io(e.to_string()))?;
    let tables = pool.install(|| execute(cfg))?;

    std::fs::create_dir_all(out_dir).map_err(|e| RunError::Io(format!("{}: {e}", out_dir.display())))?;
    let format = cfg.output.format;
    let mut outputs = Vec::new();
    for (name, table) in &tables {
        let path = out_dir.join(format!("{name}.{}", format.extension()));
        emit_table(table, format, &path)?;
        outputs.push(path);
    }
    let manifest = serde_json::json!({
        "experiment": cfg.experiment.name(),
        "config": cfg,
        "engine": cfg.engine(),
        "threads": threads,
        "library_version": qbattery_version(),
        "cli_version": env!("CARGO_PKG_VERSION"),
        "outputs": outputs.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect::<Vec<_>>(),
        "started_unix_seconds": started,
        "wall_clock_seconds": clock.elapsed().as_secs_f64(),
    });
    let manifest_path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| RunError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(&manifest_path, text).map_err(|e| RunError::Io(format!("{}: {e}", manifest_path.display())))?;
    Ok(RunReport { outputs, manifest: manifest_path })
}

fn qbattery_version() -> &'static str {
    qbattery::VERSION
}
