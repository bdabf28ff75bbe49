// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Batch experiment runner behind the `qbattery` binary.

pub mod config;
pub mod runner;
pub mod table;

pub use config::ExperimentConfig;
pub use runner::{execute, run, RunReport};
pub use table::{emit_table, read_table, Table};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Invariant(_) => "invariant_violation",
            RunError::Numerical(_) => "numerical",
            RunError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Invariant(_) => 3,
            RunError::Numerical(_) | RunError::Io(_) => 1,
        }
    }

    /// Single-line machine-readable form.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<qbattery::Error> for RunError {
    fn from(e: qbattery::Error) -> Self {
        use qbattery::Error as E;
        match e {
            E::InvariantViolation(_) => RunError::Invariant(e.to_string()),
            E::Domain(_) | E::EngineMismatch(_) | E::DimensionMismatch(_) | E::Empty(_) => RunError::Config(e.to_string()),
            _ => RunError::Numerical(e.to_string()),
        }
    }
}
