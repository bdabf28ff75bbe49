// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense linear-algebra helpers shared by the engines.
//!
//! All generators in this crate are Hermitian, so exponentials are taken
//! through an eigendecomposition and reuse the same factorization for every
//! time step. Matrices whose imaginary part vanishes identically take a real
//! symmetric fast path.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Eigendecomposition `H = V diag(values) V†` of a Hermitian matrix with
/// eigenvalues sorted in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..d {
            let w = f(self.values[j]);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Real symmetric eigendecomposition with ascending eigenvalues.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.im)
}

pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    if is_real(m) {
        let (values, vectors) = symmetric_eigen(&real_part(m));
        return HermitianEigen { values, vectors: complexify(&vectors) };
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    hermitian_eigen(h).map(|e| Complex64::new(0.0, -e * t).exp())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖H − H†‖_max`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let d = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(d, d)))
}

/// Spectral norm of a Hermitian matrix: the largest eigenvalue magnitude.
pub fn hermitian_spectral_norm(m: &CMatrix) -> f64 {
    hermitian_eigen(m).values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Spectral norm of an arbitrary square matrix via the eigenvalues of `M†M`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let gram = (&gram + gram.adjoint()).scale(0.5);
    hermitian_eigen(&gram).values.iter().fold(0.0_f64, |acc, v| acc.max(*v)).max(0.0).sqrt()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Unitary eigendecomposition `U = Q diag(e^{iφ}) Q†` with phases in `(−π, π]`.
///
/// `A = (U + U†)/2` and `B = (U − U†)/2i` are commuting Hermitian matrices
/// with eigenvalues `cos φ` and `sin φ`. The pencil `A + cB` is diagonalized
/// first; clusters it fails to split are resolved with `B − cA`.
pub fn unitary_eigen(u: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    const C: f64 = 0.754_877_666_246_692_7;
    const CLUSTER: f64 = 1e-7;
    let d = u.nrows();
    let ud = u.adjoint();
    let a = (u + &ud).scale(0.5);
    let b = (u - &ud).map(|z| z * Complex64::new(0.0, -0.5));
    let pencil = &a + b.scale(C);
    let eig = hermitian_eigen(&(&pencil + pencil.adjoint()).scale(0.5));
    let mut q = eig.vectors;
    let ortho = &b - a.scale(C);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.values[end] - eig.values[end - 1] < CLUSTER {
            end += 1;
        }
        if end - start > 1 {
            let qc = q.columns(start, end - start).into_owned();
            let k = qc.adjoint() * &ortho * &qc;
            let inner = hermitian_eigen(&(&k + k.adjoint()).scale(0.5));
            q.columns_mut(start, end - start).copy_from(&(qc * inner.vectors));
        }
        start = end;
    }
    let uq = u * &q;
    let phases: Vec<f64> = (0..d).map(|j| q.column(j).dotc(&uq.column(j)).arg()).collect();
    let diag = CVector::from_iterator(d, phases.iter().map(|p| Complex64::new(0.0, *p).exp()));
    let defect = max_abs(&(&q * CMatrix::from_diagonal(&diag) * q.adjoint() - u));
    if defect > 1e-9 {
        return Err(Error::InvariantViolation(format!("unitary eigendecomposition defect {defect:e}")));
    }
    Ok((phases, q))
}
