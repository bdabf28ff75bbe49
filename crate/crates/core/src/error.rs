// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by model construction, evolution and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two operators or states live in incompatible bases or dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    /// The zero-temperature state is not unique and must be chosen explicitly.
    #[error("degenerate ground state: {0}")]
    DegenerateGroundState(String),

    #[error("degenerate mode k={k}: quasi-mode energy {energy:e} too small")]
    DegenerateMode { k: usize, energy: f64 },

    /// The requested engine cannot represent the model.
    #[error("engine/model mismatch: {0}")]
    EngineMismatch(String),

    /// An operator does not commute with the symmetry used to reduce the basis.
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("fit failed: {0}")]
    Fit(String),

    /// A proven inequality or exact invariant failed numerically.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
