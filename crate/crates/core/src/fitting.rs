// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Least-squares fits of `a N^η + b` and `a N + b`.
//!
//! The power law is separable: for fixed `η` the best `(a, b)` is an ordinary
//! linear regression on `N^η`, so only a one-dimensional search over `η`
//! remains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ETA_MIN: f64 = 0.5;
pub const ETA_MAX: f64 = 2.5;
const COARSE_POINTS: usize = 401;
const ETA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    /// `100 · mean(residual²) / mean(value²)`.
    pub mse_percent: f64,
    /// `value − (a N^η + b)` in input order.
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.a * x.powf(self.eta) + self.b
    }

    pub fn sum_sq(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

fn check_points(points: &[(f64, f64)], min: usize) -> Result<()> {
    if points.len() < min {
        return Err(Error::Fit(format!("need at least {min} points, got {}", points.len())));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("points must be finite".into()));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("abscissae must be distinct".into()));
    }
    Ok(())
}

/// Ordinary least squares of `y` on `x` by centered sums.
fn regress(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > 0.0) || !sxx.is_finite() {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let a = sxy / sxx;
    Ok((a, my - a * mx))
}

fn finish(points: &[(f64, f64)], a: f64, b: f64, eta: f64) -> FitResult {
    let residuals: Vec<f64> = points.iter().map(|(x, y)| y - (a * x.powf(eta) + b)).collect();
    let n = points.len() as f64;
    let mse = residuals.iter().map(|r| r * r).sum::<f64>() / n;
    let scale = points.iter().map(|(_, y)| y * y).sum::<f64>() / n;
    let mse_percent = if scale > 0.0 { 100.0 * mse / scale } else { 0.0 };
    FitResult { a, b, eta, mse_percent, residuals }
}

/// Best `a N^η + b` with `η` held fixed.
pub fn fit_power_law_fixed_eta(points: &[(f64, f64)], eta: f64) -> Result<FitResult> {
    check_points(points, 2)?;
    if points.iter().any(|(x, _)| *x <= 0.0) {
        return Err(Error::Fit("power-law abscissae must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.powf(eta)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (a, b) = regress(&xs, &ys)?;
    Ok(finish(points, a, b, eta))
}

fn rss(points: &[(f64, f64)], eta: f64) -> f64 {
    fit_power_law_fixed_eta(points, eta).map(|f| f.sum_sq()).unwrap_or(f64::INFINITY)
}

/// Least-squares `a N^η + b` with `η ∈ [0.5, 2.5]`: a 401-point grid locates
/// the basin, golden-section search refines it.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    check_points(points, 4)?;
    let step = (ETA_MAX - ETA_MIN) / (COARSE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|i| ETA_MIN + step * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&e| rss(points, e)).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    if !values[best].is_finite() {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(COARSE_POINTS - 1)];
    let eta = golden_section(|e| rss(points, e), lo, hi, ETA_TOL);
    let eta = if rss(points, eta) <= values[best] { eta } else { grid[best] };
    fit_power_law_fixed_eta(points, eta)
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Ordinary least squares `a N + b`.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<FitResult> {
    check_points(points, 2)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (a, b) = regress(&xs, &ys)?;
    Ok(finish(points, a, b, 1.0))
}
