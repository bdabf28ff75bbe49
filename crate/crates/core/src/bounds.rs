// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Analytic upper bound on the stroboscopic instantaneous power for
//! `h_z = J = 1`, and a checker that compares it with simulation.
//!
//! ```text
//! |P| ≤ N Σ_{k=1}^{N−1} T^{k−1}/k! · (k+3)/2
//!     + N Σ_{m≥N} T^{m−1}/m! · Σ_{i=0}^{N−2} (i+2) C(m−1, i) / 2^{m−1}
//!     + N² Σ_{m≥N} T^{m−1}/m! · Σ_{i=N−1}^{m−1} C(m−1, i) / 2^{m−1}
//! ```
//!
//! All terms are evaluated from log-factorials so that `m!` never overflows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitting::{fit_power_law, FitResult};
use crate::floquet::{floquet_hamiltonian, half_step_unitaries, power_operator, state_expectation};
use crate::models::{initial_state, Basis, ModelKind, ModelSpec};

const REL_STOP: f64 = 1e-15;
const MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundBreakdown {
    pub n: usize,
    pub period: f64,
    pub term_a: f64,
    pub term_b_linear: f64,
    pub term_b_quadratic: f64,
    pub total: f64,
    /// Upper bound on the neglected tail of the two infinite series.
    pub truncation_error_estimate: f64,
}

/// `ln k!` for `k ≤ len`, grown on demand.
struct LogFactorials(Vec<f64>);

impl LogFactorials {
    fn new() -> Self {
        Self(vec![0.0])
    }

    fn get(&mut self, k: usize) -> f64 {
        while self.0.len() <= k {
            let j = self.0.len();
            let next = self.0[j - 1] + (j as f64).ln();
            self.0.push(next);
        }
        self.0[k]
    }

    fn ln_binomial(&mut self, n: usize, k: usize) -> f64 {
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Binomial weights of the two tail series at `m`, each divided by `2^{m−1}`:
/// `(Σ_{i≤N−2} (i+2) C(m−1,i), Σ_{i≥N−1} C(m−1,i))`.
fn tail_weights(lf: &mut LogFactorials, n: usize, m: usize) -> (f64, f64) {
    let top = m - 1;
    let ln2 = top as f64 * std::f64::consts::LN_2;
    let mut lin = Sum::default();
    let mut quad = Sum::default();
    for i in 0..=top {
        let w = (lf.ln_binomial(top, i) - ln2).exp();
        if i + 2 <= n {
            lin.add((i + 2) as f64 * w);
        } else {
            quad.add(w);
        }
    }
    (lin.value(), quad.value())
}

pub fn power_bound(n: usize, period: f64) -> Result<BoundBreakdown> {
    if n < 2 {
        return Err(Error::Domain(format!("bound needs N ≥ 2, got {n}")));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Domain(format!("period must be positive, got {period}")));
    }
    let nf = n as f64;
    let lt = period.ln();
    let mut lf = LogFactorials::new();

    let mut a = Sum::default();
    for k in 1..n {
        a.add(((k - 1) as f64 * lt - lf.get(k)).exp() * (k + 3) as f64 / 2.0);
    }
    let term_a = nf * a.value();

    let mut lin = Sum::default();
    let mut quad = Sum::default();
    let mut m = n;
    let tail = loop {
        let base = ((m - 1) as f64 * lt - lf.get(m)).exp();
        let (wl, wq) = tail_weights(&mut lf, n, m);
        let (dl, dq) = (nf * base * wl, nf * nf * base * wq);
        lin.add(dl);
        quad.add(dq);
        // the weights are bounded by N and 1, so each remaining series is
        // below N² Σ_{j>m} T^{j−1}/j!, itself geometric once m + 2 > T
        let ratio = period / (m + 2) as f64;
        if ratio < 0.5 {
            let next = nf * nf * (m as f64 * lt - lf.get(m + 1)).exp() / (1.0 - ratio);
            let (l, q) = (lin.value(), quad.value());
            if dl <= REL_STOP * l && dq <= REL_STOP * q && next <= REL_STOP * l && next <= REL_STOP * q {
                break 2.0 * next;
            }
        }
        m += 1;
        if m - n > MAX_TERMS {
            return Err(Error::Domain(format!("bound series did not converge for T = {period}")));
        }
    };
    let (term_b_linear, term_b_quadratic) = (lin.value(), quad.value());
    let total = term_a + term_b_linear + term_b_quadratic;
    if !total.is_finite() {
        return Err(Error::Domain(format!("bound overflows for N = {n}, T = {period}")));
    }
    Ok(BoundBreakdown {
        n,
        period,
        term_a,
        term_b_linear,
        term_b_quadratic,
        total,
        truncation_error_estimate: tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub bound: BoundBreakdown,
    /// `|P_ins(nT)|` for `n = 0..=n_max`, with `H_F` as generator.
    pub power: Vec<f64>,
    pub max_power: f64,
    pub n_at_max: usize,
    /// `max_n |P_ins(nT)| / bound`.
    pub max_ratio: f64,
    /// Set when the Floquet Hamiltonian sits on a branch cut.
    pub branch_warning: Option<String>,
}

/// Measures `|Tr(ρ(nT) i[H_F, H_B])|` for `n ≤ n_max` and compares it with
/// [`power_bound`]. A violation is reported as
/// [`Error::InvariantViolation`].
pub fn bound_dominance_check(model: &ModelSpec, period: f64, n_max: usize) -> Result<DominanceReport> {
    model.validate()?;
    let basis = match model.kind {
        ModelKind::LrXY => Basis::polarized_sector(model.sites),
        ModelKind::Lmg => Basis::dicke(model.sites),
        other => {
            return Err(Error::EngineMismatch(format!("bound applies to the LR XY and LMG models, got {other:?}")))
        }
    };
    if model.h_z != 1.0 || model.j != 1.0 {
        return Err(Error::Domain(format!(
            "bound assumes h_z = J = 1, got h_z = {}, J = {}",
            model.h_z, model.j
        )));
    }
    if !(model.gamma.abs() <= 1.0) {
        return Err(Error::Domain(format!("bound assumes |γ| ≤ 1, got {}", model.gamma)));
    }
    let bound = power_bound(model.sites, period)?;
    let h_b = model.battery(&basis)?;
    let prop = half_step_unitaries(&h_b, &model.interaction(1.0, &basis)?, period)?;
    let hf = floquet_hamiltonian(&prop)?;
    let rho0 = initial_state(&h_b, f64::INFINITY)?;
    let p_op = power_operator(&hf.operator, &h_b)?;
    let mut state = rho0.repr;
    let mut power = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            state = prop.propagate(&state);
        }
        power.push(state_expectation(&p_op, &state).abs());
    }
    let (n_at_max, max_power) = power
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (n, p)| if p > best.1 { (n, p) } else { best });
    let max_ratio = max_power / bound.total;
    if max_ratio > 1.0 {
        return Err(Error::InvariantViolation(format!(
            "|P_ins| = {max_power} at n = {n_at_max} exceeds the bound {} (N = {}, T = {period})",
            bound.total, model.sites
        )));
    }
    Ok(DominanceReport { bound, power, max_power, n_at_max, max_ratio, branch_warning: hf.branch_warning })
}

/// Power-law fit of the bound total against `N`.
pub fn bound_scaling_fit(sizes: &[usize], period: f64) -> Result<FitResult> {
    let pts = sizes
        .iter()
        .map(|&n| Ok((n as f64, power_bound(n, period)?.total)))
        .collect::<Result<Vec<_>>>()?;
    fit_power_law(&pts)
}
