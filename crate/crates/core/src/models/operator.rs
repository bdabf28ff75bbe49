// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use std::ops::{Add, Sub};

use num_complex::Complex64;

use super::basis::Basis;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

const HERMITICITY_TOL: f64 = 1e-12;

/// Dense Hermitian matrix tagged with the basis it is expressed in.
///
/// Construction checks `‖H − H†‖_max < 1e−12` (relative to the largest entry
/// when that exceeds one) and stores the exactly symmetrized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    basis: Basis,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(basis: Basis, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for basis of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dim()
            )));
        }
        let scale = linalg::max_abs(&matrix).max(1.0);
        let defect = linalg::hermiticity_defect(&matrix);
        if defect >= HERMITICITY_TOL * scale {
            return Err(Error::InvariantViolation(format!(
                "matrix is not Hermitian: ‖H − H†‖_max = {defect:e}"
            )));
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { basis, matrix })
    }

    pub fn zeros(basis: Basis) -> Self {
        let d = basis.dim();
        Self { basis, matrix: CMatrix::zeros(d, d) }
    }

    pub fn from_real_diagonal(basis: Basis, diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut m = CMatrix::zeros(d, d);
        for (i, v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        Self::new(basis, m)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_real(&self) -> bool {
        linalg::is_real(&self.matrix)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)] == linalg::ZERO))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.scale(factor) }
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        if self.is_diagonal() {
            let mut v: Vec<f64> = self.matrix.diagonal().iter().map(|z| z.re).collect();
            v.sort_by(f64::total_cmp);
            return v;
        }
        linalg::hermitian_eigen(&self.matrix).values.iter().copied().collect()
    }

    pub fn eigen(&self) -> linalg::HermitianEigen {
        linalg::hermitian_eigen(&self.matrix)
    }

    /// `[self, other]`, which is anti-Hermitian and therefore returned as a
    /// plain matrix.
    pub fn commutator(&self, other: &Self) -> Result<CMatrix> {
        self.check_compatible(other)?;
        Ok(linalg::commutator(&self.matrix, &other.matrix))
    }

    /// `‖[self, other]‖` in spectral norm.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        let c = self.commutator(other)?;
        // i[A, B] is Hermitian
        Ok(linalg::hermitian_spectral_norm(&c.map(|z| z * linalg::I)))
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch(format!(
                "operators in different bases: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { basis: self.basis.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { basis: self.basis.clone(), matrix: &self.matrix - &other.matrix })
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    /// Panics when the bases differ; use [`HermitianOperator::try_add`] otherwise.
    fn add(self, rhs: Self) -> HermitianOperator {
        self.try_add(rhs).expect("operator bases differ")
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: Self) -> HermitianOperator {
        self.try_sub(rhs).expect("operator bases differ")
    }
}
