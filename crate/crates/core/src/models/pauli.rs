// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Spin operators as sums of Pauli strings, materialized into a dense matrix
//! on demand.

use std::collections::HashMap;

use num_complex::Complex64;

use super::basis::{Basis, SectorBasis};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// `coeff · Π σ^{p}_{site}` over distinct sites (0-based).
#[derive(Debug, Clone)]
struct Term {
    coeff: Complex64,
    flip: u64,
    y: u64,
    z: u64,
}

impl Term {
    /// Image of the computational state `s` and its amplitude.
    #[inline]
    fn apply(&self, s: u64) -> (u64, Complex64) {
        let y_up = (s & self.y).count_ones() as i32;
        let y_down = self.y.count_ones() as i32 - y_up;
        // σ^y|1⟩ = i|0⟩, σ^y|0⟩ = −i|1⟩
        let phase = match (y_up - y_down).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let sign = if (!s & self.z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        (s ^ self.flip, self.coeff * phase * sign)
    }
}

/// Operator on a chain of `sites` spin-1/2 sites.
#[derive(Debug, Clone)]
pub struct SpinOperator {
    sites: usize,
    terms: Vec<Term>,
}

impl SpinOperator {
    pub fn new(sites: usize) -> Self {
        assert!((1..=62).contains(&sites));
        Self { sites, terms: Vec::new() }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · Π σ^{p}_{site}`; sites are 0-based and must be distinct.
    pub fn add(&mut self, coeff: impl Into<Complex64>, ops: &[(usize, Pauli)]) {
        let coeff = coeff.into();
        if coeff == ZERO {
            return;
        }
        let (mut flip, mut y, mut z, mut seen) = (0u64, 0u64, 0u64, 0u64);
        for &(site, p) in ops {
            assert!(site < self.sites, "site {site} outside chain of {}", self.sites);
            let bit = 1u64 << (self.sites - 1 - site);
            assert!(seen & bit == 0, "repeated site {site} in Pauli string");
            seen |= bit;
            match p {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    y |= bit
                }
                Pauli::Z => z |= bit,
            }
        }
        self.terms.push(Term { coeff, flip, y, z });
    }

    pub fn extend(&mut self, other: &SpinOperator) {
        assert_eq!(self.sites, other.sites);
        self.terms.extend(other.terms.iter().cloned());
    }

    /// Dense matrix in a computational or sector basis.
    pub fn to_matrix(&self, basis: &Basis) -> Result<CMatrix> {
        match basis {
            Basis::FullSpin { sites } if *sites == self.sites => Ok(self.full_matrix()),
            Basis::Sector(sector) if sector.sites == self.sites => self.sector_matrix(sector),
            other => Err(Error::DimensionMismatch(format!(
                "{}-site spin operator cannot be expressed in basis {other:?}",
                self.sites
            ))),
        }
    }

    fn full_matrix(&self) -> CMatrix {
        let d = 1usize << self.sites;
        let mut m = CMatrix::zeros(d, d);
        for s in 0..d as u64 {
            for term in &self.terms {
                let (t, amp) = term.apply(s);
                m[(t as usize, s as usize)] += amp;
            }
        }
        m
    }

    fn sector_matrix(&self, sector: &SectorBasis) -> Result<CMatrix> {
        let d = sector.dim();
        let mut m = CMatrix::zeros(d, d);
        let mut image: HashMap<u64, Complex64> = HashMap::new();
        for col in 0..d {
            image.clear();
            for (s, c) in sector.components(col) {
                for term in &self.terms {
                    let (t, amp) = term.apply(s);
                    *image.entry(t).or_insert(ZERO) += amp * c;
                }
            }
            for (&t, &amp) in &image {
                let Some((row, c)) = sector.position(t) else {
                    if amp.norm() > 1e-13 {
                        return Err(Error::SymmetryViolation(format!(
                            "operator leaves the even-parity sector (state {t:#b})"
                        )));
                    }
                    continue;
                };
                if sector.reflection {
                    let partner = image.get(&sector.reflect(t)).copied().unwrap_or(ZERO);
                    if (partner - amp).norm() > 1e-12 * (1.0 + amp.norm()) {
                        return Err(Error::SymmetryViolation(
                            "operator is not reflection symmetric".into(),
                        ));
                    }
                }
                m[(row, col)] += amp * c;
            }
        }
        Ok(m)
    }
}
