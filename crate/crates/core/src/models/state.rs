// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::basis::Basis;
use super::operator::HermitianOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(CVector),
    Mixed(CMatrix),
}

/// Thermal state `exp(−βH_B)/Tr exp(−βH_B)` of a battery Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub beta: f64,
    pub basis: Basis,
    pub repr: StateRepr,
}

impl InitialState {
    pub fn pure(basis: Basis, vector: CVector) -> Self {
        Self { beta: f64::INFINITY, basis, repr: StateRepr::Pure(vector) }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn density_matrix(&self) -> CMatrix {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Mixed(rho) => rho.clone(),
        }
    }

    /// `Tr(ρ H)`.
    pub fn expectation(&self, op: &HermitianOperator) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => (v.adjoint() * op.matrix() * v)[(0, 0)].re,
            StateRepr::Mixed(rho) => linalg::trace_product(rho, op.matrix()).re,
        }
    }
}

/// Gibbs state of `h_b` at inverse temperature `beta`; `beta = ∞` gives the
/// ground state as a pure vector.
///
/// Finite temperatures need the full computational basis: a Gibbs state
/// restricted to a symmetry sector is not the thermal state of the chain.
pub fn initial_state(h_b: &HermitianOperator, beta: f64) -> Result<InitialState> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Domain(format!("inverse temperature must be positive, got {beta}")));
    }
    let basis = h_b.basis().clone();
    let d = h_b.dim();
    if h_b.is_diagonal() {
        return diagonal_state(h_b, beta);
    }
    let eig = h_b.eigen();
    let e0 = eig.values[0];
    if beta.is_infinite() {
        let gap = if d > 1 { eig.values[1] - e0 } else { f64::INFINITY };
        if gap < 1e-12 * (1.0 + e0.abs()) {
            return Err(Error::DegenerateGroundState(format!(
                "ground energy {e0} is degenerate; choose the initial state explicitly"
            )));
        }
        let v = eig.vectors.column(0).into_owned();
        // fix the global phase so the largest component is real positive
        let (imax, _) = v.iter().enumerate().fold((0, 0.0), |acc, (i, z)| {
            if z.norm() > acc.1 {
                (i, z.norm())
            } else {
                acc
            }
        });
        let phase = v[imax].conj() / v[imax].norm();
        return Ok(InitialState { beta, basis, repr: StateRepr::Pure(v * phase) });
    }
    if !matches!(basis, Basis::FullSpin { .. } | Basis::KMode) {
        return Err(Error::Domain(
            "finite-temperature states require the full computational basis".into(),
        ));
    }
    // shift by the ground energy so the weights cannot overflow
    let weights: Vec<f64> = eig.values.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let rho = eig.map(|e| Complex64::new((-beta * (e - e0)).exp() / z, 0.0));
    Ok(InitialState { beta, basis, repr: StateRepr::Mixed(rho) })
}

/// Same as the general path without an eigensolver: the eigenvectors of a
/// diagonal battery are the basis vectors.
fn diagonal_state(h_b: &HermitianOperator, beta: f64) -> Result<InitialState> {
    let basis = h_b.basis().clone();
    let diag: Vec<f64> = h_b.matrix().diagonal().iter().map(|z| z.re).collect();
    let d = diag.len();
    let (imin, e0) = diag
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
    if beta.is_infinite() {
        let tol = 1e-12 * (1.0 + e0.abs());
        if diag.iter().enumerate().any(|(i, &e)| i != imin && e - e0 < tol) {
            return Err(Error::DegenerateGroundState(format!(
                "ground energy {e0} is degenerate; choose the initial state explicitly"
            )));
        }
        let mut v = CVector::zeros(d);
        v[imin] = Complex64::new(1.0, 0.0);
        return Ok(InitialState { beta, basis, repr: StateRepr::Pure(v) });
    }
    if !matches!(basis, Basis::FullSpin { .. } | Basis::KMode) {
        return Err(Error::Domain(
            "finite-temperature states require the full computational basis".into(),
        ));
    }
    let weights: Vec<f64> = diag.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(d, d);
    for (i, w) in weights.iter().enumerate() {
        rho[(i, i)] = Complex64::new(w / z, 0.0);
    }
    Ok(InitialState { beta, basis, repr: StateRepr::Mixed(rho) })
}
