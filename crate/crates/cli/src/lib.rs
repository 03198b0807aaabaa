//! Command-line experiment runner: configuration, experiments, and CSV output.

pub mod config;
pub mod experiments;

use std::fmt;
use std::path::{Path, PathBuf};

use config::{parse_config, ConfigError, EstimationMode, ExperimentConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Distribution,
    Filter,
    Cumulants,
    Charfunc,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Runtime(qfcs_core::Error),
    Io(std::io::Error),
}

impl RunError {
    /// 1 for configuration problems, 2 for everything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Runtime(_) | RunError::Io(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Runtime(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<qfcs_core::Error> for RunError {
    fn from(e: qfcs_core::Error) -> Self {
        RunError::Runtime(e)
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub mode: Option<EstimationMode>,
    pub shots: Option<u64>,
}

pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig, RunError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut config = parse_config(&text)?;
    if let Some(seed) = overrides.seed {
        config.estimation.seed = seed;
    }
    if let Some(out) = &overrides.out {
        config.output.path = Some(out.clone());
    }
    if let Some(mode) = overrides.mode {
        config.estimation.mode = mode;
    }
    if let Some(shots) = overrides.shots {
        config.estimation.shots = shots;
    }
    config.validate()?;
    Ok(config)
}

pub fn run(command: Command, config: &ExperimentConfig) -> Result<String, RunError> {
    match command {
        Command::Distribution => experiments::run_distribution_experiment(config),
        Command::Filter => experiments::run_filter_experiment(config),
        Command::Cumulants => experiments::run_cumulant_experiment(config),
        Command::Charfunc => experiments::run_charfunc_dump(config),
    }
}

/// Runs `command` and writes the CSV to the configured path, or returns it for stdout.
pub fn run_to_output(command: Command, config: &ExperimentConfig) -> Result<Option<String>, RunError> {
    let csv = run(command, config)?;
    match &config.output.path {
        Some(path) => {
            std::fs::write(path, csv).map_err(RunError::Io)?;
            Ok(None)
        }
        None => Ok(Some(csv)),
    }
}
