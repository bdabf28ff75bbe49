// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Stored work, average power and the maximization over stroboscopic steps
//! and drive frequencies.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{evolve_trace, half_step_unitaries, DriveEigensystem};
use crate::freefermion;
use crate::models::{
    initial_state, normalize_spectrum, Basis, HermitianOperator, ModelKind, ModelSpec, StateRepr,
};

pub const DEFAULT_N_MAX: usize = 500;

/// `W(nT)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StroboscopicTrace {
    period: f64,
    work: Vec<f64>,
}

impl StroboscopicTrace {
    pub fn new(period: f64, work: Vec<f64>) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::Domain(format!("period must be positive, got {period}")));
        }
        match work.first() {
            None => Err(Error::Empty("trace has no entries".into())),
            Some(w0) if w0.abs() > 1e-12 => {
                Err(Error::InvariantViolation(format!("W(0) must vanish, got {w0}")))
            }
            Some(_) => Ok(Self { period, work }),
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn work(&self) -> &[f64] {
        &self.work
    }

    pub fn n_max(&self) -> usize {
        self.work.len() - 1
    }

    /// `W(nT)/(nT)`; zero at `n = 0`.
    pub fn average_power(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.work[n] / (n as f64 * self.period)
        }
    }

    /// `(n, W(nT), W(nT)/(nT))` in increasing `n`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.work.iter().enumerate().map(|(n, &w)| (n, w, self.average_power(n)))
    }

    /// Multiplies every work value by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { period: self.period, work: self.work.iter().map(|w| w * factor).collect() }
    }
}

fn argmax_from_one(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i + 1, v);
        }
    }
    best
}

/// `max_{n ≥ 1} W(nT)/(nT)`, ties going to the smaller `n`.
pub fn max_power_over_n(trace: &StroboscopicTrace) -> Result<(usize, f64)> {
    if trace.n_max() == 0 {
        return Err(Error::Empty("trace has no steps beyond n = 0".into()));
    }
    Ok(argmax_from_one((1..=trace.n_max()).map(|n| trace.average_power(n))))
}

/// `max_{n ≥ 1} W(nT)`, ties going to the smaller `n`.
pub fn max_work_over_n(trace: &StroboscopicTrace) -> Result<(usize, f64)> {
    if trace.n_max() == 0 {
        return Err(Error::Empty("trace has no steps beyond n = 0".into()));
    }
    Ok(argmax_from_one(trace.work[1..].iter().copied()))
}

/// Propagation engine for an ω-scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    /// Dense evolution; pure states run in the even-parity,
    /// reflection-symmetric sector that contains the polarized state.
    #[serde(rename = "ED")]
    Ed,
    /// Collective-spin basis of dimension `N + 1`; LMG only.
    Dicke,
    /// Per-momentum 2×2 algebra; extended XY only.
    FreeFermion,
}

/// `count` logarithmically spaced frequencies in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(Error::Domain(format!("invalid grid [{lo}, {hi}] with {count} points")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect())
}

/// 200 log-spaced points in `[0.1, 100]`.
pub fn default_omega_grid() -> Vec<f64> {
    log_grid(0.1, 100.0, 200).expect("static grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaPoint {
    pub omega: f64,
    pub n_star: usize,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaScan {
    pub points: Vec<OmegaPoint>,
    /// Largest power over the grid; ties go to the smaller ω, then smaller n.
    pub best: OmegaPoint,
}

impl OmegaScan {
    pub fn from_points(points: Vec<OmegaPoint>) -> Result<Self> {
        let mut best: Option<OmegaPoint> = None;
        for p in &points {
            best = Some(match best {
                None => *p,
                Some(b) if p.power > b.power => *p,
                Some(b) if p.power == b.power && (p.omega, p.n_star) < (b.omega, b.n_star) => *p,
                Some(b) => b,
            });
        }
        let best = best.ok_or_else(|| Error::Empty("ω grid is empty".into()))?;
        Ok(Self { points, best })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub beta: f64,
    pub n_max: usize,
    /// Report work in units of the battery bandwidth `(E_max − E_min)/2`.
    pub normalize_work: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { beta: f64::INFINITY, n_max: DEFAULT_N_MAX, normalize_work: false }
    }
}

/// `H_B` itself, or `H_B` affinely mapped onto `[−1, 1]`.
pub fn normalized_work_switch(h_b: &HermitianOperator, flag: bool) -> Result<HermitianOperator> {
    if flag {
        normalize_spectrum(h_b)
    } else {
        Ok(h_b.clone())
    }
}

/// Factor converting work into normalized units: `2/(E_max − E_min)` of the
/// Zeeman battery on the whole chain, i.e. `1/(N|h_z|)`.
pub fn work_normalization(model: &ModelSpec, flag: bool) -> Result<f64> {
    if !flag {
        return Ok(1.0);
    }
    let width = 2.0 * model.sites as f64 * model.h_z.abs();
    if width <= 0.0 {
        return Err(Error::DegenerateSpectrum("battery spectrum has zero width".into()));
    }
    Ok(2.0 / width)
}

/// Basis in which `engine` evolves `model` at inverse temperature `beta`.
pub fn engine_basis(model: &ModelSpec, engine: Engine, beta: f64) -> Result<Basis> {
    let n = model.sites;
    match engine {
        Engine::Ed if beta.is_infinite() => Ok(Basis::polarized_sector(n)),
        Engine::Ed => Ok(Basis::full(n)),
        Engine::Dicke if model.kind == ModelKind::Lmg => Ok(Basis::dicke(n)),
        Engine::Dicke => Err(Error::EngineMismatch(format!(
            "Dicke engine needs the LMG model, got {:?}",
            model.kind
        ))),
        Engine::FreeFermion if model.kind == ModelKind::ExtendedXY => Ok(Basis::KMode),
        Engine::FreeFermion => Err(Error::EngineMismatch(format!(
            "free-fermion engine needs the extended XY model, got {:?}",
            model.kind
        ))),
    }
}

/// `max_n W(nT)/(nT)` at every grid frequency and the global maximum.
pub fn scan_omega(
    model: &ModelSpec,
    omegas: &[f64],
    engine: Engine,
    opts: &ScanOptions,
) -> Result<OmegaScan> {
    let basis = engine_basis(model, engine, opts.beta)?;
    scan_omega_in_basis(model, omegas, engine, &basis, opts)
}

/// As [`scan_omega`] with an explicit basis for the dense engines.
pub fn scan_omega_in_basis(
    model: &ModelSpec,
    omegas: &[f64],
    engine: Engine,
    basis: &Basis,
    opts: &ScanOptions,
) -> Result<OmegaScan> {
    model.validate()?;
    if omegas.is_empty() {
        return Err(Error::Empty("ω grid is empty".into()));
    }
    if omegas.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::Domain("frequencies must be positive".into()));
    }
    if opts.n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    engine_basis(model, engine, opts.beta)?;
    let scale = work_normalization(model, opts.normalize_work)?;
    let periods: Vec<f64> = omegas.iter().map(|w| 2.0 * PI / w).collect();
    let best = match engine {
        Engine::FreeFermion => {
            if !opts.beta.is_infinite() {
                return Err(Error::Domain("free-fermion engine evolves the ground state only".into()));
            }
            periods
                .par_iter()
                .map(|&t| freefermion::best_power_ff(model, t, opts.n_max))
                .collect::<Result<Vec<_>>>()?
        }
        Engine::Ed | Engine::Dicke => dense_best_powers(model, basis, &periods, opts)?,
    };
    let points = omegas
        .iter()
        .zip(best)
        .map(|(&omega, (n_star, p))| OmegaPoint { omega, n_star, power: p * scale })
        .collect();
    OmegaScan::from_points(points)
}

fn dense_best_powers(
    model: &ModelSpec,
    basis: &Basis,
    periods: &[f64],
    opts: &ScanOptions,
) -> Result<Vec<(usize, f64)>> {
    let h_b = model.battery(basis)?;
    let h_int = model.interaction(1.0, basis)?;
    let rho0 = initial_state(&h_b, opts.beta)?;
    match &rho0.repr {
        StateRepr::Pure(psi0) if h_b.is_real() && h_int.is_real() => {
            let eig = DriveEigensystem::new(&h_b, &h_int, psi0)?;
            let threads = rayon::current_num_threads().max(1);
            let chunk = periods.len().div_ceil(threads);
            let parts: Vec<Vec<(usize, f64)>> = periods
                .par_chunks(chunk)
                .map(|ts| eig.best_powers(ts, opts.n_max))
                .collect::<Result<_>>()?;
            Ok(parts.into_iter().flatten().collect())
        }
        _ => periods
            .par_iter()
            .map(|&t| {
                let prop = half_step_unitaries(&h_b, &h_int, t)?;
                max_power_over_n(&evolve_trace(&prop, &rho0, &h_b, opts.n_max)?)
            })
            .collect(),
    }
}

/// Work trace of `model` at one period with the chosen engine.
pub fn work_trace(
    model: &ModelSpec,
    period: f64,
    engine: Engine,
    opts: &ScanOptions,
) -> Result<StroboscopicTrace> {
    let basis = engine_basis(model, engine, opts.beta)?;
    work_trace_in_basis(model, period, engine, &basis, opts)
}

pub fn work_trace_in_basis(
    model: &ModelSpec,
    period: f64,
    engine: Engine,
    basis: &Basis,
    opts: &ScanOptions,
) -> Result<StroboscopicTrace> {
    model.validate()?;
    engine_basis(model, engine, opts.beta)?;
    let scale = work_normalization(model, opts.normalize_work)?;
    let trace = match engine {
        Engine::FreeFermion => freefermion::work_trace_ff(model, period, opts.n_max)?,
        Engine::Ed | Engine::Dicke => {
            let h_b = model.battery(basis)?;
            let h_int = model.interaction(1.0, basis)?;
            let rho0 = initial_state(&h_b, opts.beta)?;
            match &rho0.repr {
                StateRepr::Pure(psi0) if h_b.is_real() && h_int.is_real() => {
                    let eig = DriveEigensystem::new(&h_b, &h_int, psi0)?;
                    eig.traces(&[period], opts.n_max)?.remove(0)
                }
                _ => {
                    let prop = half_step_unitaries(&h_b, &h_int, period)?;
                    evolve_trace(&prop, &rho0, &h_b, opts.n_max)?
                }
            }
        }
    };
    Ok(trace.scaled(scale))
}
