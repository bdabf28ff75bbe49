// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Momentum-space solution of the extended XY ring.
//!
//! After a Jordan–Wigner transformation the even-parity sector has
//! antiperiodic boundary conditions, so the modes are `φ_k = (2k−1)π/N` for
//! `k = 1..=N/2`, and each pair `(k, −k)` evolves in the two-dimensional space
//! spanned by `|0⟩` and `c†_k c†_{−k}|0⟩`. On that pair the drive acts as
//!
//! ```text
//! H_k = [ (1+γ) Re J'_k − 2h_z        i(1−γ) Im J'_k      ]
//!       [ −i(1−γ) Im J'_k             −(1+γ) Re J'_k + 2h_z ]
//! ```
//!
//! with `J'_k = 2 J_k` and `J_k` the structure factor below, and the battery
//! is `−2h_z τ^z`. The polarized spin state maps to `(1, 0)` in every pair.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::models::{kac_norm, ModelKind, ModelSpec};
use crate::observables::StroboscopicTrace;

/// Below this energy a mode's Bloch angle is undefined.
const DEGENERATE_ENERGY: f64 = 1e-14;

/// One momentum pair and its Floquet Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMode {
    pub k: usize,
    pub phi_k: f64,
    /// Structure factor at `+J`.
    pub jk_alpha: Complex64,
    pub e1: f64,
    pub e2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub delta_k: f64,
    pub u0: f64,
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
    /// `arccos(u0)/T`.
    pub beta_t: f64,
    pub nz: f64,
}

impl KMode {
    /// Work stored by this pair after `n` periods.
    pub fn work(&self, n: usize, h_z: f64) -> f64 {
        let s = (n as f64 * self.u0.clamp(-1.0, 1.0).acos()).sin();
        4.0 * h_z * (1.0 - self.nz * self.nz) * s * s
    }

    /// `4h_z(1 − n_z²)`, the largest amount this pair can store.
    pub fn amplitude(&self, h_z: f64) -> f64 {
        4.0 * h_z * (1.0 - self.nz * self.nz)
    }
}

pub fn momentum(sites: usize, k: usize) -> f64 {
    (2 * k - 1) as f64 * PI / sites as f64
}

/// `Σ_{r=1}^{z} J/(4𝒩 r^α) e^{iφ r}` with `𝒩 = Σ_{r=1}^{z} r^{−α}`.
pub fn structure_factor_at(z: usize, alpha: f64, j: f64, phi: f64) -> Result<Complex64> {
    let norm = kac_norm(alpha, z)?;
    Ok((1..=z)
        .map(|r| {
            let c = j / (4.0 * norm * (r as f64).powf(alpha));
            Complex64::from_polar(c, phi * r as f64)
        })
        .sum())
}

/// Structure factor of the `N`-site ring at mode `k` with full range `N/2`.
pub fn structure_factor(sites: usize, alpha: f64, j: f64, k: usize) -> Result<Complex64> {
    structure_factor_range(sites, sites / 2, alpha, j, k)
}

pub fn structure_factor_range(sites: usize, z: usize, alpha: f64, j: f64, k: usize) -> Result<Complex64> {
    if sites % 2 != 0 || sites == 0 {
        return Err(Error::Domain(format!("ring needs an even number of sites, got {sites}")));
    }
    if k == 0 || k > sites / 2 {
        return Err(Error::Domain(format!("mode index {k} outside 1..={}", sites / 2)));
    }
    structure_factor_at(z, alpha, j, momentum(sites, k))
}

/// Pair Hamiltonian `H_k` for structure factor `jk`.
pub fn mode_hamiltonian(h_z: f64, gamma: f64, jk: Complex64) -> CMatrix {
    let (a, b) = mode_coefficients(h_z, gamma, jk);
    CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(a, 0.0), Complex64::new(0.0, b), Complex64::new(0.0, -b), Complex64::new(-a, 0.0)],
    )
}

/// `H_k = a τ^z − b τ^y`.
fn mode_coefficients(h_z: f64, gamma: f64, jk: Complex64) -> (f64, f64) {
    let jp = 2.0 * jk;
    ((1.0 + gamma) * jp.re - 2.0 * h_z, (1.0 - gamma) * jp.im)
}

/// Floquet Bloch vector of one pair: `U = u0 − i(u·τ)` with
/// `U = e^{−iH_k(−J)T/2} e^{−iH_k(+J)T/2}`.
///
/// Writing `H_k = E(sin θ τ^y − cos θ τ^z)`,
///
/// ```text
/// u0 = c1 c2 − s1 s2 cos Δ      ux = s1 s2 sin Δ
/// uy = s1 c2 sin θ1 + c1 s2 sin θ2
/// uz = −(s1 c2 cos θ1 + c1 s2 cos θ2)
/// ```
///
/// with `c_i = cos(E_i T/2)`, `s_i = sin(E_i T/2)` and `Δ = θ1 − θ2`.
pub fn mode_bloch(
    sites: usize,
    k: usize,
    h_z: f64,
    gamma: f64,
    jk_plus: Complex64,
    jk_minus: Complex64,
    period: f64,
) -> Result<KMode> {
    let angle = |jk: Complex64| {
        let (a, b) = mode_coefficients(h_z, gamma, jk);
        let e = a.hypot(b);
        if e < DEGENERATE_ENERGY {
            return Err(Error::DegenerateMode { k, energy: e });
        }
        Ok((e, (-b).atan2(-a)))
    };
    let (e1, theta1) = angle(jk_plus)?;
    let (e2, theta2) = angle(jk_minus)?;
    let delta_k = theta1 - theta2;
    let (s1, c1) = (e1 * period / 2.0).sin_cos();
    let (s2, c2) = (e2 * period / 2.0).sin_cos();
    let u0 = c1 * c2 - s1 * s2 * delta_k.cos();
    let ux = s1 * s2 * delta_k.sin();
    let uy = s1 * c2 * theta1.sin() + c1 * s2 * theta2.sin();
    let uz = -(s1 * c2 * theta1.cos() + c1 * s2 * theta2.cos());
    let sin_beta = (1.0 - u0 * u0).max(0.0).sqrt();
    // U = ±I transfers nothing; any unit vector along z is then consistent
    let nz = if sin_beta > 1e-300 { (uz / sin_beta).clamp(-1.0, 1.0) } else { 1.0 };
    Ok(KMode {
        k,
        phi_k: momentum(sites, k),
        jk_alpha: jk_plus,
        e1,
        e2,
        theta1,
        theta2,
        delta_k,
        u0,
        ux,
        uy,
        uz,
        beta_t: u0.clamp(-1.0, 1.0).acos() / period,
        nz,
    })
}

fn check_model(model: &ModelSpec) -> Result<()> {
    if model.kind != ModelKind::ExtendedXY {
        return Err(Error::EngineMismatch(format!(
            "free-fermion solution needs the extended XY model, got {:?}",
            model.kind
        )));
    }
    model.validate()?;
    if !(model.h_z > 0.0) {
        return Err(Error::Domain(format!(
            "free-fermion engine starts from the polarized state and needs h_z > 0, got {}",
            model.h_z
        )));
    }
    Ok(())
}

/// All non-degenerate pairs of `model` at period `period`, in increasing `k`.
pub fn modes(model: &ModelSpec, period: f64) -> Result<Vec<KMode>> {
    check_model(model)?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {period}")));
    }
    let n = model.sites;
    let mut out = Vec::with_capacity(n / 2);
    for k in 1..=n / 2 {
        let plus = structure_factor_range(n, model.z, model.alpha, model.j, k)?;
        let minus = -plus;
        match mode_bloch(n, k, model.h_z, model.gamma, plus, minus, period) {
            Ok(m) => out.push(m),
            Err(Error::DegenerateMode { k, energy }) => {
                log::debug!("mode {k} skipped: energy {energy:e}");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `W(nT) = Σ_k 4h_z (1 − n_z²) sin²(n arccos u0)`.
pub fn work_trace_ff(model: &ModelSpec, period: f64, n_max: usize) -> Result<StroboscopicTrace> {
    let ms = modes(model, period)?;
    let work = (0..=n_max).map(|n| ms.iter().map(|m| m.work(n, model.h_z)).sum()).collect();
    StroboscopicTrace::new(period, work)
}

/// `(n*, max_n W(nT)/(nT))`, stopping once `2Nh_z/(nT)` falls below the
/// running maximum.
pub fn best_power_ff(model: &ModelSpec, period: f64, n_max: usize) -> Result<(usize, f64)> {
    let ms = modes(model, period)?;
    let cap: f64 = ms.iter().map(|m| m.amplitude(model.h_z)).sum::<f64>() * (1.0 + 1e-12) + 1e-15;
    let mut best = (0, f64::NEG_INFINITY);
    for n in 1..=n_max {
        let w: f64 = ms.iter().map(|m| m.work(n, model.h_z)).sum();
        let p = w / (n as f64 * period);
        if p > best.1 {
            best = (n, p);
        }
        if cap / ((n + 1) as f64 * period) < best.1 {
            break;
        }
    }
    Ok(best)
}
