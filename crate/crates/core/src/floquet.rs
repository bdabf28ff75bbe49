// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Square-wave stroboscopic evolution.
//!
//! The drive is `J(t) = +J` on the first half of each period and `−J` on the
//! second, so one period is `U^F = U_2 U_1` with
//! `U_{1,2} = exp[−i(H_B ± H_int)T/2]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::models::{Basis, HermitianOperator, InitialState, StateRepr};
use crate::observables::StroboscopicTrace;

const UNITARITY_TOL: f64 = 1e-10;
const BRANCH_TOL: f64 = 1e-9;

/// Period and horizon of the square-wave drive. The amplitude lives in the
/// model specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    pub period: f64,
    pub n_max: usize,
}

impl DriveSpec {
    pub fn new(period: f64, n_max: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Domain(format!("period must be positive, got {period}")));
        }
        if n_max == 0 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        Ok(Self { period, n_max })
    }

    pub fn from_omega(omega: f64, n_max: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
        }
        Self::new(2.0 * PI / omega, n_max)
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }
}

/// Half-period unitaries and the one-period Floquet unitary.
#[derive(Debug, Clone)]
pub struct FloquetPropagator {
    basis: Basis,
    period: f64,
    u1: CMatrix,
    u2: CMatrix,
    uf: CMatrix,
}

/// Eigendecomposition `U^F = Q diag(e^{iφ}) Q†`.
#[derive(Debug, Clone)]
pub struct FloquetSpectrum {
    pub phases: Vec<f64>,
    pub vectors: CMatrix,
}

/// `U_1 = exp[−i(H_B + H_int)T/2]`, `U_2 = exp[−i(H_B − H_int)T/2]`,
/// `U^F = U_2 U_1`, each by Hermitian eigendecomposition.
pub fn half_step_unitaries(
    h_b: &HermitianOperator,
    h_int: &HermitianOperator,
    period: f64,
) -> Result<FloquetPropagator> {
    h_b.check_compatible(h_int)?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {period}")));
    }
    let h1 = h_b.try_add(h_int)?;
    let h2 = h_b.try_sub(h_int)?;
    let u1 = linalg::expm_hermitian(h1.matrix(), period / 2.0);
    let u2 = linalg::expm_hermitian(h2.matrix(), period / 2.0);
    let uf = &u2 * &u1;
    for (name, u) in [("U1", &u1), ("U2", &u2), ("UF", &uf)] {
        let defect = linalg::unitarity_defect(u);
        if defect >= UNITARITY_TOL {
            return Err(Error::InvariantViolation(format!("{name} not unitary: defect {defect:e}")));
        }
    }
    Ok(FloquetPropagator { basis: h_b.basis().clone(), period, u1, u2, uf })
}

impl FloquetPropagator {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn u1(&self) -> &CMatrix {
        &self.u1
    }

    pub fn u2(&self) -> &CMatrix {
        &self.u2
    }

    pub fn uf(&self) -> &CMatrix {
        &self.uf
    }

    /// One period forward.
    pub fn propagate(&self, state: &StateRepr) -> StateRepr {
        match state {
            StateRepr::Pure(v) => StateRepr::Pure(&self.uf * v),
            StateRepr::Mixed(rho) => StateRepr::Mixed(&self.uf * rho * self.uf.adjoint()),
        }
    }

    /// State after `n` periods.
    pub fn state_at(&self, rho0: &InitialState, n: usize) -> Result<StateRepr> {
        self.check_state(rho0)?;
        let mut s = rho0.repr.clone();
        for _ in 0..n {
            s = self.propagate(&s);
        }
        Ok(s)
    }

    pub fn spectrum(&self) -> Result<FloquetSpectrum> {
        let (phases, vectors) = linalg::unitary_eigen(&self.uf)?;
        Ok(FloquetSpectrum { phases, vectors })
    }

    fn check_state(&self, rho0: &InitialState) -> Result<()> {
        if rho0.basis != self.basis {
            return Err(Error::DimensionMismatch(format!(
                "state in basis {:?}, propagator in {:?}",
                rho0.basis, self.basis
            )));
        }
        Ok(())
    }
}

/// `W(nT) = Tr(H_B ρ(nT)) − Tr(H_B ρ(0))` for `n = 0..=n_max`.
pub fn evolve_trace(
    prop: &FloquetPropagator,
    rho0: &InitialState,
    h_b: &HermitianOperator,
    n_max: usize,
) -> Result<StroboscopicTrace> {
    prop.check_state(rho0)?;
    if h_b.basis() != prop.basis() {
        return Err(Error::DimensionMismatch("battery and propagator bases differ".into()));
    }
    let e0 = rho0.expectation(h_b);
    let energy = |s: &StateRepr| match s {
        StateRepr::Pure(v) => expectation_pure(h_b, v),
        StateRepr::Mixed(rho) => linalg::trace_product(rho, h_b.matrix()).re,
    };
    let mut work = Vec::with_capacity(n_max + 1);
    work.push(0.0);
    let mut s = rho0.repr.clone();
    for _ in 0..n_max {
        s = prop.propagate(&s);
        work.push(energy(&s) - e0);
    }
    StroboscopicTrace::new(prop.period(), work)
}

fn expectation_pure(h: &HermitianOperator, v: &CVector) -> f64 {
    if h.is_diagonal() {
        return h.matrix().diagonal().iter().zip(v.iter()).map(|(e, z)| e.re * z.norm_sqr()).sum();
    }
    (v.adjoint() * h.matrix() * v)[(0, 0)].re
}

/// Exact Floquet Hamiltonian `H_F = (i/T) log U^F` on the principal branch.
#[derive(Debug, Clone)]
pub struct FloquetHamiltonian {
    pub operator: HermitianOperator,
    /// Quasi-energies in `(−π/T, π/T]`, in the order of the eigenvectors.
    pub quasienergies: Vec<f64>,
    /// Set when an eigen-phase lies within `1e−9` of the branch cut.
    pub branch_warning: Option<String>,
}

pub fn floquet_hamiltonian(prop: &FloquetPropagator) -> Result<FloquetHamiltonian> {
    let t = prop.period();
    let FloquetSpectrum { phases, vectors } = prop.spectrum()?;
    let mut branch_warning = None;
    let quasienergies: Vec<f64> = phases
        .iter()
        .map(|&phi| {
            if PI - phi.abs() < BRANCH_TOL {
                branch_warning = Some(format!(
                    "eigen-phase {phi} within {BRANCH_TOL:e} of the branch cut; quasi-energy ambiguous"
                ));
            }
            // U^F eigenvalue e^{iφ} = e^{−iεT}
            let eps = -phi / t;
            if eps <= -PI / t {
                eps + 2.0 * PI / t
            } else {
                eps
            }
        })
        .collect();
    if let Some(w) = &branch_warning {
        log::warn!("{w}");
    }
    let mut scaled = vectors.clone();
    for (j, e) in quasienergies.iter().enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= *e;
        }
    }
    let h = scaled * vectors.adjoint();
    let operator = HermitianOperator::new(prop.basis().clone(), h)?;
    Ok(FloquetHamiltonian { operator, quasienergies, branch_warning })
}

/// `i[G, H_B]`, the rate of change of the battery energy under the flow
/// generated by `G`.
pub fn power_operator(generator: &HermitianOperator, h_b: &HermitianOperator) -> Result<HermitianOperator> {
    let c = generator.commutator(h_b)?;
    HermitianOperator::new(h_b.basis().clone(), c.map(|z| z * linalg::I))
}

/// `Tr(ρ · i[G, H_B]) = d/dt Tr(H_B e^{−iGt} ρ e^{iGt})` at `t = 0`.
///
/// With `G = H_F` this is the instantaneous power at a stroboscopic instant;
/// with `G = H_B + H_int` it is the one-sided derivative entering the next
/// half-period. The magnitude is bounded by `‖[G, H_B]‖`.
pub fn instantaneous_power(
    generator: &HermitianOperator,
    h_b: &HermitianOperator,
    state: &StateRepr,
) -> Result<f64> {
    Ok(state_expectation(&power_operator(generator, h_b)?, state))
}

/// `Tr(ρ O)` for a pure or mixed state.
pub fn state_expectation(op: &HermitianOperator, state: &StateRepr) -> f64 {
    match state {
        StateRepr::Pure(v) => expectation_pure(op, v),
        StateRepr::Mixed(rho) => linalg::trace_product(rho, op.matrix()).re,
    }
}

/// Eigenbasis of both half-period generators, for fast evolution of a pure
/// state at many periods at once.
///
/// With `H_1 = V_1 D_1 V_1ᵀ` and `H_2 = V_2 D_2 V_2ᵀ` one period acts on
/// coordinates `c = V_1ᵀψ` as `c ← Wᵀ e^{−iD_2T/2} W e^{−iD_1T/2} c` with
/// `W = V_2ᵀV_1`; neither factorization depends on `T`. Only real symmetric
/// generators are supported.
#[derive(Debug, Clone)]
pub struct DriveEigensystem {
    basis: Basis,
    d1: DVector<f64>,
    d2: DVector<f64>,
    w: DMatrix<f64>,
    battery: DMatrix<f64>,
    c0_re: DVector<f64>,
    c0_im: DVector<f64>,
    e0: f64,
    capacity: f64,
}

/// Columns evolved together in one matrix product.
const BATCH: usize = 256;

impl DriveEigensystem {
    pub fn new(h_b: &HermitianOperator, h_int: &HermitianOperator, psi0: &CVector) -> Result<Self> {
        h_b.check_compatible(h_int)?;
        if psi0.len() != h_b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for dimension {}",
                psi0.len(),
                h_b.dim()
            )));
        }
        if !h_b.is_real() || !h_int.is_real() {
            return Err(Error::Domain("eigenbasis propagation needs real symmetric generators".into()));
        }
        let hb = linalg::real_part(h_b.matrix());
        let hi = linalg::real_part(h_int.matrix());
        let (d1, v1) = linalg::symmetric_eigen(&(&hb + &hi));
        let (d2, v2) = linalg::symmetric_eigen(&(&hb - &hi));
        let w = v2.tr_mul(&v1);
        let battery = v1.tr_mul(&(&hb * &v1));
        let c0_re = v1.tr_mul(&psi0.map(|z| z.re));
        let c0_im = v1.tr_mul(&psi0.map(|z| z.im));
        let e0 = expectation_pure(h_b, psi0);
        let e_max = if h_b.is_diagonal() {
            hb.diagonal().max()
        } else {
            linalg::symmetric_eigen(&hb).0.max()
        };
        Ok(Self { basis: h_b.basis().clone(), d1, d2, w, battery, c0_re, c0_im, e0, capacity: e_max - e0 })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.d1.len()
    }

    /// `E_max(H_B) − ⟨H_B⟩_0`, an upper bound on the work at every step.
    pub fn work_capacity(&self) -> f64 {
        self.capacity
    }

    /// Full work traces, one per period.
    pub fn traces(&self, periods: &[f64], n_max: usize) -> Result<Vec<StroboscopicTrace>> {
        let mut work: Vec<Vec<f64>> = periods.iter().map(|_| vec![0.0]).collect();
        self.run(periods, n_max, |col, _, w| {
            work[col].push(w);
            true
        })?;
        periods.iter().zip(work).map(|(&t, w)| StroboscopicTrace::new(t, w)).collect()
    }

    /// `(n*, max_n W(nT)/(nT))` for each period, with ties resolved toward the
    /// smaller `n`.
    ///
    /// A column stops once `capacity/(nT)` drops below its running maximum;
    /// no later step can then exceed it, so the result equals the full scan.
    pub fn best_powers(&self, periods: &[f64], n_max: usize) -> Result<Vec<(usize, f64)>> {
        let mut best: Vec<(usize, f64)> = vec![(0, f64::NEG_INFINITY); periods.len()];
        let cap = self.capacity * (1.0 + 1e-9) + 1e-12;
        self.run(periods, n_max, |col, n, w| {
            let t = periods[col];
            let p = w / (n as f64 * t);
            if p > best[col].1 {
                best[col] = (n, p);
            }
            cap / ((n + 1) as f64 * t) >= best[col].1
        })?;
        Ok(best)
    }

    /// Evolves every period for up to `n_max` steps, calling
    /// `visit(column, n, W(nT))`; a column is dropped when `visit` returns
    /// false.
    fn run(
        &self,
        periods: &[f64],
        n_max: usize,
        mut visit: impl FnMut(usize, usize, f64) -> bool,
    ) -> Result<()> {
        if periods.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::Domain("periods must be positive".into()));
        }
        for (chunk_idx, chunk) in periods.chunks(BATCH).enumerate() {
            let offset = chunk_idx * BATCH;
            let cols: Vec<usize> = (0..chunk.len()).map(|k| offset + k).collect();
            self.run_batch(periods, cols, n_max, &mut visit);
        }
        Ok(())
    }

    fn run_batch(
        &self,
        periods: &[f64],
        mut active: Vec<usize>,
        n_max: usize,
        visit: &mut impl FnMut(usize, usize, f64) -> bool,
    ) {
        let d = self.dim();
        let phases = |diag: &DVector<f64>, cols: &[usize]| {
            let angles = DMatrix::from_fn(d, cols.len(), |i, k| diag[i] * periods[cols[k]] / 2.0);
            (angles.map(f64::cos), angles.map(f64::sin))
        };
        let (mut cos1, mut sin1) = phases(&self.d1, &active);
        let (mut cos2, mut sin2) = phases(&self.d2, &active);
        // column 2k holds the real part of state k, column 2k+1 the imaginary part
        let mut c = DMatrix::from_fn(d, 2 * active.len(), |i, j| {
            if j % 2 == 0 {
                self.c0_re[i]
            } else {
                self.c0_im[i]
            }
        });
        let mut x = DMatrix::zeros(d, c.ncols());
        let mut y = DMatrix::zeros(d, c.ncols());
        for n in 1..=n_max {
            rotate(&mut c, &cos1, &sin1);
            x.gemm(1.0, &self.w, &c, 0.0);
            rotate(&mut x, &cos2, &sin2);
            c.gemm_tr(1.0, &self.w, &x, 0.0);
            y.gemm(1.0, &self.battery, &c, 0.0);
            let mut keep = Vec::with_capacity(active.len());
            for (k, &col) in active.iter().enumerate() {
                let e = c.column(2 * k).dot(&y.column(2 * k)) + c.column(2 * k + 1).dot(&y.column(2 * k + 1));
                if visit(col, n, e - self.e0) && n < n_max {
                    keep.push(k);
                }
            }
            if keep.is_empty() {
                return;
            }
            if keep.len() < active.len() {
                let pairs: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
                c = c.select_columns(pairs.iter());
                cos1 = cos1.select_columns(keep.iter());
                sin1 = sin1.select_columns(keep.iter());
                cos2 = cos2.select_columns(keep.iter());
                sin2 = sin2.select_columns(keep.iter());
                active = keep.iter().map(|&k| active[k]).collect();
                x = DMatrix::zeros(d, c.ncols());
                y = DMatrix::zeros(d, c.ncols());
            }
        }
    }
}

/// Multiplies each complex column pair by `e^{−iθ}` given `cos θ`, `sin θ`.
fn rotate(c: &mut DMatrix<f64>, cos: &DMatrix<f64>, sin: &DMatrix<f64>) {
    let d = c.nrows();
    for k in 0..cos.ncols() {
        let (cs, sn) = (cos.column(k), sin.column(k));
        let mut pair = c.columns_mut(2 * k, 2);
        for i in 0..d {
            let (re, im) = (pair[(i, 0)], pair[(i, 1)]);
            pair[(i, 0)] = re * cs[i] + im * sn[i];
            pair[(i, 1)] = im * cs[i] - re * sn[i];
        }
    }
}
