// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

pub mod bounds;
pub mod error;
pub mod fitting;
pub mod floquet;
pub mod freefermion;
pub mod linalg;
pub mod magnus;
pub mod models;
pub mod observables;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
