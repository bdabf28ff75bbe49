// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qbattery::fitting::{fit_linear, fit_power_law};
use qbattery::observables::Engine;
use qbattery_cli::{read_table, run, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(name = "qbattery", version, about = "Floquet quantum-battery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    #[value(name = "ED")]
    Ed,
    #[value(name = "Dicke")]
    Dicke,
    #[value(name = "FreeFermion")]
    FreeFermion,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Ed => Engine::Ed,
            EngineArg::Dicke => Engine::Dicke,
            EngineArg::FreeFermion => Engine::FreeFermion,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FitModel {
    Powerlaw,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its tables and a manifest.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// Fit a column of a CSV table against another.
    Fit {
        table: PathBuf,
        #[arg(long, value_enum, default_value = "powerlaw")]
        model: FitModel,
        #[arg(long, default_value = "N")]
        x: String,
        #[arg(long, default_value = "P_max")]
        y: String,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprintln!("{}", RunError::Config(e.to_string().trim().to_string()).to_json());
            return ExitCode::from(2);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run { config, out, engine, threads } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(e) = engine {
                cfg.engine = Some(e.into());
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let dir = out
                .or_else(|| cfg.output.path.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            let report = run(&cfg, &dir)?;
            for p in report.outputs.iter().chain([&report.manifest]) {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            ExperimentConfig::load(&config)?;
            println!("ok");
            Ok(())
        }
        Command::Fit { table, model, x, y } => {
            let t = read_table(&table)?;
            let pts: Vec<(f64, f64)> = t.floats(&x)?.into_iter().zip(t.floats(&y)?).collect();
            let (name, f) = match model {
                FitModel::Powerlaw => ("powerlaw", fit_power_law(&pts)?),
                FitModel::Linear => ("linear", fit_linear(&pts)?),
            };
            let out = serde_json::json!({
                "model": name,
                "a": f.a,
                "b": f.b,
                "eta": f.eta,
                "mse_percent": f.mse_percent,
                "residuals": f.residuals,
            });
            println!("{out}");
            Ok(())
        }
    }
}
