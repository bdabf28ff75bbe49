// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration. Unknown keys are rejected everywhere.

use std::path::Path;

use qbattery::floquet::DriveSpec;
use qbattery::models::{LmgPrefactor, ModelKind, ModelSpec};
use qbattery::observables::{default_omega_grid, log_grid, Engine, DEFAULT_N_MAX};
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Trace,
    OmegaScan,
    Scaling,
    GammaSweep,
    AlphaSweep,
    ZSweep,
    NnnSweep,
    Bound,
    FmeCompare,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Trace => "trace",
            Experiment::OmegaScan => "omega_scan",
            Experiment::Scaling => "scaling",
            Experiment::GammaSweep => "gamma_sweep",
            Experiment::AlphaSweep => "alpha_sweep",
            Experiment::ZSweep => "z_sweep",
            Experiment::NnnSweep => "nnn_sweep",
            Experiment::Bound => "bound",
            Experiment::FmeCompare => "fme_compare",
        }
    }

    pub fn sweep_variable(self) -> Option<&'static str> {
        match self {
            Experiment::GammaSweep => Some("gamma"),
            Experiment::AlphaSweep => Some("alpha"),
            Experiment::ZSweep => Some("Z"),
            Experiment::NnnSweep => Some("J2_over_J1"),
            _ => None,
        }
    }
}

/// A coordination number, or `"max"` for `N − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Number(f64),
    Keyword(Keyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Keyword {
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    pub h_z: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "J2", default)]
    pub j2: f64,
    pub gamma: f64,
    #[serde(default)]
    pub alpha: f64,
    /// Defaults: `N − 1` (LrXY, LMG), `N/2` (ExtendedXY), 2 (NNN).
    #[serde(rename = "Z", default)]
    pub z: Option<SweepValue>,
    #[serde(default)]
    pub lmg_prefactor: LmgPrefactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub period: Option<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub values: Vec<SweepValue>,
    /// NNN sweeps only: keep `J1 + J2` at its configured value instead of
    /// holding `J1` fixed.
    #[serde(default)]
    pub hold_amplitude_sum: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelConfig,
    #[serde(default)]
    pub drive: Option<DriveConfig>,
    /// Inverse temperature of the initial state; absent means zero temperature.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub omega_grid: Option<GridConfig>,
    #[serde(rename = "N_list", default)]
    pub n_list: Option<Vec<usize>>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub normalize_work: bool,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub engine: Option<Engine>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(f64::INFINITY)
    }

    pub fn n_max(&self) -> usize {
        self.drive.as_ref().map_or(DEFAULT_N_MAX, |d| d.n_max)
    }

    /// The single drive period of a `trace` or `bound` run.
    pub fn drive_spec(&self) -> Result<DriveSpec, RunError> {
        let d = self
            .drive
            .as_ref()
            .ok_or_else(|| config_err(format!("experiment {} needs a drive", self.experiment.name())))?;
        let spec = match (d.omega, d.period) {
            (Some(w), None) => DriveSpec::from_omega(w, d.n_max),
            (None, Some(t)) => DriveSpec::new(t, d.n_max),
            _ => return Err(config_err("drive needs exactly one of omega and period")),
        };
        spec.map_err(|e| config_err(e.to_string()))
    }

    /// The explicit grid, else the drive frequency alone, else the default grid.
    pub fn omegas(&self) -> Result<Vec<f64>, RunError> {
        if let Some(g) = &self.omega_grid {
            let grid = match g.spacing {
                Spacing::Log => log_grid(g.min, g.max, g.count).map_err(|e| config_err(e.to_string()))?,
                Spacing::Linear => {
                    if !(g.min > 0.0 && g.max >= g.min && g.max.is_finite()) || g.count == 0 {
                        return Err(config_err(format!("invalid grid [{}, {}] with {} points", g.min, g.max, g.count)));
                    }
                    if g.count == 1 {
                        vec![g.min]
                    } else {
                        (0..g.count).map(|i| g.min + (g.max - g.min) * i as f64 / (g.count - 1) as f64).collect()
                    }
                }
            };
            return Ok(grid);
        }
        if self.drive.is_some() {
            return Ok(vec![self.drive_spec()?.omega()]);
        }
        Ok(default_omega_grid())
    }

    pub fn sizes(&self) -> Result<Vec<usize>, RunError> {
        match (&self.n_list, self.model.n) {
            (Some(list), _) if !list.is_empty() => Ok(list.clone()),
            (Some(_), _) => Err(config_err("N_list is empty")),
            (None, Some(n)) => Ok(vec![n]),
            (None, None) => Err(config_err("model.N or N_list is required")),
        }
    }

    pub fn engine(&self) -> Engine {
        self.engine.unwrap_or(match self.model.kind {
            ModelKind::Lmg => Engine::Dicke,
            ModelKind::ExtendedXY => Engine::FreeFermion,
            _ => Engine::Ed,
        })
    }

    /// Model at size `n` with an optional sweep value applied.
    pub fn model_at(&self, n: usize, sweep: Option<SweepValue>) -> Result<ModelSpec, RunError> {
        let m = &self.model;
        let mut spec = ModelSpec {
            kind: m.kind,
            sites: n,
            h_z: m.h_z,
            j: m.j,
            j2: m.j2,
            gamma: m.gamma,
            alpha: m.alpha,
            z: 0,
            lmg_prefactor: m.lmg_prefactor,
        };
        let mut z = m.z;
        if let Some(v) = sweep {
            let num = |v: SweepValue| match v {
                SweepValue::Number(x) => Ok(x),
                SweepValue::Keyword(_) => Err(config_err("\"max\" is only valid for Z")),
            };
            match self.experiment {
                Experiment::GammaSweep => spec.gamma = num(v)?,
                Experiment::AlphaSweep => spec.alpha = num(v)?,
                Experiment::ZSweep => z = Some(v),
                Experiment::NnnSweep => {
                    let r = num(v)?;
                    let hold = self.sweep.as_ref().is_some_and(|s| s.hold_amplitude_sum);
                    if hold {
                        let sum = m.j + m.j2;
                        spec.j = sum / (1.0 + r);
                        spec.j2 = r * spec.j;
                    } else {
                        spec.j2 = r * m.j;
                    }
                }
                _ => {}
            }
        }
        spec.z = match z {
            None => match m.kind {
                ModelKind::LrXY | ModelKind::Lmg => n.saturating_sub(1),
                ModelKind::ExtendedXY => n / 2,
                ModelKind::Nnn => 2,
            },
            Some(SweepValue::Keyword(Keyword::Max)) => match m.kind {
                ModelKind::ExtendedXY => n / 2,
                _ => n.saturating_sub(1),
            },
            Some(SweepValue::Number(x)) => {
                if x.fract() != 0.0 || x < 1.0 {
                    return Err(config_err(format!("Z must be a positive integer, got {x}")));
                }
                x as usize
            }
        };
        spec.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(spec)
    }

    pub fn sweep_values(&self) -> Result<Vec<SweepValue>, RunError> {
        match (&self.sweep, self.experiment.sweep_variable()) {
            (Some(s), Some(_)) if !s.values.is_empty() => Ok(s.values.clone()),
            (Some(_), Some(_)) => Err(config_err("sweep.values is empty")),
            (None, Some(v)) => Err(config_err(format!("experiment {} needs sweep values for {v}", self.experiment.name()))),
            (Some(_), None) => Err(config_err(format!("experiment {} takes no sweep", self.experiment.name()))),
            (None, None) => Ok(Vec::new()),
        }
    }

    /// Checks everything that can be checked without running an engine.
    pub fn validate(&self) -> Result<(), RunError> {
        if let Some(b) = self.beta {
            if !(b > 0.0) {
                return Err(config_err(format!("beta must be positive, got {b}")));
            }
        }
        if self.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }
        if let Some(d) = &self.drive {
            if d.n_max == 0 {
                return Err(config_err("drive.n_max must be at least 1"));
            }
        }
        let sizes = self.sizes()?;
        let sweep = self.sweep_values()?;
        self.omegas()?;
        let engine = self.engine();
        let points: Vec<Option<SweepValue>> =
            if sweep.is_empty() { vec![None] } else { sweep.into_iter().map(Some).collect() };
        for &n in &sizes {
            for &v in &points {
                let spec = self.model_at(n, v)?;
                qbattery::observables::engine_basis(&spec, engine, self.beta())
                    .map_err(|e| config_err(e.to_string()))?;
            }
        }
        match self.experiment {
            Experiment::Trace | Experiment::Bound => {
                self.drive_spec()?;
            }
            Experiment::FmeCompare if self.model.kind != ModelKind::Nnn => {
                return Err(config_err("fme_compare needs the NNN model"));
            }
            Experiment::NnnSweep if self.model.kind != ModelKind::Nnn => {
                return Err(config_err("nnn_sweep needs the NNN model"));
            }
            _ => {}
        }
        if self.experiment == Experiment::Bound {
            if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
                return Err(config_err(format!("bound needs N ≥ 2, got {n}")));
            }
        }
        if matches!(self.experiment, Experiment::Trace | Experiment::OmegaScan) && sizes.len() != 1 {
            return Err(config_err(format!("experiment {} takes a single N", self.experiment.name())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "experiment": "scaling",
            "model": {"kind": "LMG", "h_z": 1.0, "J": 20.0, "gamma": -1.0},
            "N_list": [6, 8, 10]
        })
    }

    #[test]
    fn minimal_scaling_config() {
        let cfg = ExperimentConfig::from_json(&base().to_string()).unwrap();
        assert_eq!(cfg.engine(), Engine::Dicke);
        assert_eq!(cfg.omegas().unwrap().len(), 200);
        assert_eq!(cfg.model_at(8, None).unwrap().z, 7);
        assert!(cfg.beta().is_infinite());
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = base();
        v["colour"] = serde_json::json!("blue");
        assert!(matches!(ExperimentConfig::from_json(&v.to_string()), Err(RunError::Config(_))));
        let mut v = base();
        v["model"]["spin"] = serde_json::json!(1);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn engine_mismatch_rejected() {
        let mut v = base();
        v["engine"] = serde_json::json!("FreeFermion");
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn drive_needs_one_of_omega_and_period() {
        let mut v = base();
        v["experiment"] = serde_json::json!("trace");
        v["N_list"] = serde_json::json!([6]);
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        v["drive"] = serde_json::json!({"omega": 2.0, "period": 1.0});
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        v["drive"] = serde_json::json!({"period": 0.5, "n_max": 10});
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        assert_eq!(cfg.drive_spec().unwrap().period, 0.5);
    }

    #[test]
    fn sweeps_apply_values() {
        let v = serde_json::json!({
            "experiment": "z_sweep",
            "model": {"kind": "LrXY", "h_z": 0.5, "J": 5.0, "gamma": -1.0, "alpha": 0.5},
            "N_list": [6, 8],
            "sweep": {"values": [2, "max"]}
        });
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        let vals = cfg.sweep_values().unwrap();
        assert_eq!(cfg.model_at(8, Some(vals[0])).unwrap().z, 2);
        assert_eq!(cfg.model_at(8, Some(vals[1])).unwrap().z, 7);

        let v = serde_json::json!({
            "experiment": "nnn_sweep",
            "model": {"kind": "NNN", "N": 6, "h_z": 0.5, "J": 2.0, "gamma": -1.0},
            "N_list": [4, 5],
            "sweep": {"values": [1.0, 3.0], "hold_amplitude_sum": true}
        });
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        let m = cfg.model_at(5, Some(SweepValue::Number(3.0))).unwrap();
        assert!((m.j - 0.5).abs() < 1e-15 && (m.j2 - 1.5).abs() < 1e-15);
    }

    #[test]
    fn sweep_presence_must_match_experiment() {
        let mut v = base();
        v["sweep"] = serde_json::json!({"values": [1.0]});
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        let mut v = base();
        v["experiment"] = serde_json::json!("gamma_sweep");
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
        v["sweep"] = serde_json::json!({"values": ["max"]});
        assert!(ExperimentConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn linear_grid() {
        let mut v = base();
        v["omega_grid"] = serde_json::json!({"min": 1.0, "max": 3.0, "count": 3, "spacing": "linear"});
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        assert_eq!(cfg.omegas().unwrap(), vec![1.0, 2.0, 3.0]);
    }
}
