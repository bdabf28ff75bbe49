// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Battery and charging Hamiltonians.
//!
//! Conventions: sites are numbered `1..=N` in documentation and `0..N` in
//! code; the single-site state `|0⟩` is the `σ^z = −1` eigenvector, so the
//! polarized product state `|00…0⟩` is the ground state of
//! `H_B = h_z Σ_j σ^z_j` for `h_z > 0`.

mod basis;
mod operator;
mod pauli;
mod state;

use serde::{Deserialize, Serialize};

pub use basis::{Basis, SectorBasis};
pub use operator::HermitianOperator;
pub use pauli::{Pauli, SpinOperator};
pub use state::{initial_state, InitialState, StateRepr};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Long-range XY chain with Kac-normalized power-law couplings, open ends.
    LrXY,
    /// All-to-all limit of `LrXY` (`α = 0`, `Z = N − 1`) with a collective-spin
    /// representation.
    #[serde(rename = "LMG")]
    Lmg,
    /// XY couplings dressed with `σ^z` strings on a ring; free-fermion solvable.
    ExtendedXY,
    /// Nearest plus next-nearest neighbour XY chain, open ends.
    #[serde(rename = "NNN")]
    Nnn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Prefactor of the collective-spin interaction.
///
/// `KacConsistent` uses `J/(2(N−1))`, which is exactly the `α = 0`,
/// `Z = N − 1` limit of the Kac-normalized long-range chain. `InverseN`
/// uses `J/(2N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LmgPrefactor {
    #[default]
    KacConsistent,
    InverseN,
}

/// Full parameterization of one charging model.
///
/// `j` is the drive amplitude `J` (the nearest-neighbour amplitude `J1` for
/// [`ModelKind::Nnn`]); `j2` is only used by the NNN model. `z` is the
/// coordination number for `LrXY`/`LMG` and the maximum string range for
/// `ExtendedXY` (at most `N/2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub sites: usize,
    pub h_z: f64,
    pub j: f64,
    #[serde(default)]
    pub j2: f64,
    pub gamma: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub z: usize,
    #[serde(default)]
    pub lmg_prefactor: LmgPrefactor,
}

impl ModelSpec {
    pub fn lr_xy(sites: usize, h_z: f64, j: f64, gamma: f64, alpha: f64, z: usize) -> Self {
        Self {
            kind: ModelKind::LrXY,
            sites,
            h_z,
            j,
            j2: 0.0,
            gamma,
            alpha,
            z,
            lmg_prefactor: LmgPrefactor::KacConsistent,
        }
    }

    pub fn lmg(sites: usize, h_z: f64, j: f64, gamma: f64) -> Self {
        Self {
            kind: ModelKind::Lmg,
            alpha: 0.0,
            z: sites.saturating_sub(1),
            ..Self::lr_xy(sites, h_z, j, gamma, 0.0, 1)
        }
    }

    pub fn extended_xy(sites: usize, h_z: f64, j: f64, gamma: f64, alpha: f64) -> Self {
        Self { kind: ModelKind::ExtendedXY, z: sites / 2, ..Self::lr_xy(sites, h_z, j, gamma, alpha, 1) }
    }

    pub fn nnn(sites: usize, h_z: f64, j1: f64, j2: f64, gamma: f64) -> Self {
        Self { kind: ModelKind::Nnn, j2, z: 2, ..Self::lr_xy(sites, h_z, j1, gamma, 0.0, 1) }
    }

    pub fn with_prefactor(mut self, prefactor: LmgPrefactor) -> Self {
        self.lmg_prefactor = prefactor;
        self
    }

    pub fn boundary(&self) -> Boundary {
        match self.kind {
            ModelKind::ExtendedXY => Boundary::Periodic,
            _ => Boundary::Open,
        }
    }

    /// Same model with the drive amplitudes set to zero.
    pub fn undriven(&self) -> Self {
        Self { j: 0.0, j2: 0.0, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sites;
        let finite = [self.h_z, self.j, self.j2, self.gamma, self.alpha];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("model parameters must be finite".into()));
        }
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 sites, got {n}")));
        }
        if self.alpha < 0.0 {
            return Err(Error::Domain(format!("fall-off rate must be ≥ 0, got {}", self.alpha)));
        }
        match self.kind {
            ModelKind::LrXY => {
                if self.z == 0 || self.z > n - 1 {
                    return Err(Error::Domain(format!(
                        "coordination number must satisfy 1 ≤ Z ≤ N−1 = {}, got {}",
                        n - 1,
                        self.z
                    )));
                }
            }
            ModelKind::Lmg => {
                if self.alpha != 0.0 || self.z != n - 1 {
                    return Err(Error::Domain("LMG requires α = 0 and Z = N − 1".into()));
                }
            }
            ModelKind::ExtendedXY => {
                if n % 2 != 0 {
                    return Err(Error::Domain(format!("extended XY needs an even ring, got N = {n}")));
                }
                if self.z == 0 || self.z > n / 2 {
                    return Err(Error::Domain(format!(
                        "extended XY range must satisfy 1 ≤ r ≤ N/2 = {}, got {}",
                        n / 2,
                        self.z
                    )));
                }
            }
            ModelKind::Nnn => {
                if n < 3 && self.j2 != 0.0 {
                    return Err(Error::Domain("next-nearest coupling needs N ≥ 3".into()));
                }
            }
        }
        Ok(())
    }

    /// `H_B` in `basis`.
    pub fn battery(&self, basis: &Basis) -> Result<HermitianOperator> {
        build_battery(self.sites, self.h_z, basis)
    }

    /// `H_int` at the instantaneous drive value `sign · J` (`sign = ±1`).
    pub fn interaction(&self, sign: f64, basis: &Basis) -> Result<HermitianOperator> {
        self.validate()?;
        match (self.kind, basis) {
            (ModelKind::Lmg, Basis::Dicke { .. }) => build_lmg_dicke(self, sign * self.j),
            (_, Basis::Dicke { .. }) => Err(Error::EngineMismatch(format!(
                "{:?} has no collective-spin representation",
                self.kind
            ))),
            (ModelKind::LrXY, _) => build_lr_xy(self, sign * self.j, basis),
            (ModelKind::Lmg, _) => {
                let pair = match self.lmg_prefactor {
                    LmgPrefactor::KacConsistent => 1.0 / (self.sites - 1) as f64,
                    LmgPrefactor::InverseN => 1.0 / self.sites as f64,
                };
                let op = xy_couplings(self.sites, self.gamma, |r| {
                    (r < self.sites).then_some(sign * self.j * pair)
                });
                HermitianOperator::new(basis.clone(), op.to_matrix(basis)?)
            }
            (ModelKind::ExtendedXY, _) => build_extended_xy(self, sign * self.j, basis),
            (ModelKind::Nnn, _) => build_nnn(self, sign, basis),
        }
    }
}

/// Kac normalization `Σ_{r=1}^{Z} r^{−α}`.
pub fn kac_norm(alpha: f64, z: usize) -> Result<f64> {
    if z == 0 {
        return Err(Error::Domain("Kac normalization needs Z ≥ 1".into()));
    }
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("fall-off rate must be ≥ 0, got {alpha}")));
    }
    Ok((1..=z).map(|r| (r as f64).powf(-alpha)).sum())
}

/// `H_B = h_z Σ_j σ^z_j`.
pub fn build_battery(sites: usize, h_z: f64, basis: &Basis) -> Result<HermitianOperator> {
    if sites == 0 {
        return Err(Error::Domain("battery needs at least one site".into()));
    }
    if basis.sites() != Some(sites) {
        return Err(Error::DimensionMismatch(format!(
            "{sites}-site battery in basis {basis:?}"
        )));
    }
    let n = sites as f64;
    let diag: Vec<f64> = match basis {
        Basis::FullSpin { .. } => (0..1u64 << sites)
            .map(|s| h_z * (2.0 * s.count_ones() as f64 - n))
            .collect(),
        Basis::Sector(sector) => (0..sector.dim())
            .map(|i| {
                let (s, _) = sector.components(i).next().expect("non-empty basis vector");
                h_z * (2.0 * s.count_ones() as f64 - n)
            })
            .collect(),
        Basis::Dicke { .. } => (0..=sites).map(|i| h_z * (2.0 * i as f64 - n)).collect(),
        Basis::KMode => unreachable!("KMode has no site count"),
    };
    HermitianOperator::from_real_diagonal(basis.clone(), &diag)
}

/// `Σ_{i<j} c(|i−j|) (σ^x_i σ^x_j + γ σ^y_i σ^y_j)` on an open chain, with
/// `c(r) = None` meaning no coupling at separation `r`.
fn xy_couplings(sites: usize, gamma: f64, coupling: impl Fn(usize) -> Option<f64>) -> SpinOperator {
    let mut op = SpinOperator::new(sites);
    for i in 0..sites {
        for j in i + 1..sites {
            if let Some(c) = coupling(j - i) {
                op.add(c, &[(i, Pauli::X), (j, Pauli::X)]);
                op.add(c * gamma, &[(i, Pauli::Y), (j, Pauli::Y)]);
            }
        }
    }
    op
}

/// Long-range XY interaction with couplings `J/(𝒩 |i−j|^α)` for `|i−j| ≤ Z`.
pub fn build_lr_xy(spec: &ModelSpec, j_signed: f64, basis: &Basis) -> Result<HermitianOperator> {
    let n = spec.sites;
    if spec.z == 0 || spec.z > n.saturating_sub(1) {
        return Err(Error::Domain(format!("coordination number {} outside 1..={}", spec.z, n - 1)));
    }
    let norm = kac_norm(spec.alpha, spec.z)?;
    let op = xy_couplings(n, spec.gamma, |r| {
        (r <= spec.z).then(|| j_signed / (norm * (r as f64).powf(spec.alpha)))
    });
    HermitianOperator::new(basis.clone(), op.to_matrix(basis)?)
}

/// NN + NNN interaction `Σ (J1/2)(XX + γYY)_{i,i+1} + Σ (J2/2)(XX + γYY)_{i,i+2}`
/// with both amplitudes multiplied by `sign`.
pub fn build_nnn(spec: &ModelSpec, sign: f64, basis: &Basis) -> Result<HermitianOperator> {
    if spec.sites < 3 && spec.j2 != 0.0 {
        return Err(Error::Domain("next-nearest coupling needs N ≥ 3".into()));
    }
    let op = xy_couplings(spec.sites, spec.gamma, |r| match r {
        1 => Some(sign * spec.j / 2.0),
        2 => Some(sign * spec.j2 / 2.0),
        _ => None,
    });
    HermitianOperator::new(basis.clone(), op.to_matrix(basis)?)
}

/// Extended XY interaction on a ring:
/// `Σ_j Σ_{r=1}^{Z} J/(4𝒩 r^α) (σ^x_j Z_r σ^x_{j+r} + γ σ^y_j Z_r σ^y_{j+r})`
/// with the string `Z_r = Π_{l=j+1}^{j+r−1} σ^z_l` and indices taken mod N.
pub fn build_extended_xy(spec: &ModelSpec, j_signed: f64, basis: &Basis) -> Result<HermitianOperator> {
    let n = spec.sites;
    if n % 2 != 0 {
        return Err(Error::Domain(format!("extended XY needs an even ring, got N = {n}")));
    }
    if spec.z == 0 || spec.z > n / 2 {
        return Err(Error::Domain(format!("range {} outside 1..={}", spec.z, n / 2)));
    }
    let norm = kac_norm(spec.alpha, spec.z)?;
    let mut op = SpinOperator::new(n);
    let mut ops = Vec::with_capacity(n);
    for j in 0..n {
        for r in 1..=spec.z {
            let c = j_signed / (4.0 * norm * (r as f64).powf(spec.alpha));
            for (p, weight) in [(Pauli::X, 1.0), (Pauli::Y, spec.gamma)] {
                ops.clear();
                ops.push((j, p));
                ops.extend((1..r).map(|l| ((j + l) % n, Pauli::Z)));
                ops.push(((j + r) % n, p));
                op.add(c * weight, &ops);
            }
        }
    }
    HermitianOperator::new(basis.clone(), op.to_matrix(basis)?)
}

/// Collective-spin interaction in the Dicke basis:
/// `J/(2N') [(1+γ)(S₊S₋ + S₋S₊ − N) + (1−γ)(S₊² + S₋²)]` with `N' = N − 1`
/// (Kac-consistent) or `N' = N`.
pub fn build_lmg_dicke(spec: &ModelSpec, j_signed: f64) -> Result<HermitianOperator> {
    let n = spec.sites;
    if n < 2 {
        return Err(Error::Domain("LMG needs N ≥ 2".into()));
    }
    let d = n + 1;
    let s = n as f64 / 2.0;
    // S₊|S,m⟩ = √(S(S+1) − m(m+1)) |S,m+1⟩ with index i ↔ m = i − S
    let mut s_plus = CMatrix::zeros(d, d);
    for i in 0..n {
        let m = i as f64 - s;
        s_plus[(i + 1, i)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let s_minus = s_plus.transpose();
    let ident = CMatrix::identity(d, d);
    let hop = &s_plus * &s_minus + &s_minus * &s_plus - ident.scale(n as f64);
    let pair = &s_plus * &s_plus + &s_minus * &s_minus;
    let denom = match spec.lmg_prefactor {
        LmgPrefactor::KacConsistent => 2.0 * (n - 1) as f64,
        LmgPrefactor::InverseN => 2.0 * n as f64,
    };
    let m = (hop.scale(1.0 + spec.gamma) + pair.scale(1.0 - spec.gamma)).scale(j_signed / denom);
    HermitianOperator::new(Basis::dicke(n), m)
}

/// Affine map of `h` onto spectrum `[−1, 1]`:
/// `(2H − (E_max + E_min) I)/(E_max − E_min)`.
pub fn normalize_spectrum(h: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = h.spectrum();
    let (lo, hi) = (spec[0], spec[spec.len() - 1]);
    if hi - lo <= 1e-14 * (1.0 + hi.abs().max(lo.abs())) {
        return Err(Error::DegenerateSpectrum(format!("E_max = E_min = {hi}")));
    }
    let d = h.dim();
    let shifted = h.matrix().scale(2.0) - CMatrix::identity(d, d).scale(hi + lo);
    HermitianOperator::new(h.basis().clone(), shifted.scale(1.0 / (hi - lo)))
}

#[cfg(test)]
mod tests;
