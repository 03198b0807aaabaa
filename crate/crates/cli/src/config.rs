//! Experiment configuration.
//!
//! The file is TOML restricted to five tables (`[model]`, `[estimation]`,
//! `[filter]`, `[cumulants]`, `[output]`). Every key is optional and unknown
//! keys are rejected. An empty file gives the reference setting
//! `L = 12, J = h_x = h_z = 1, t = 1`.

use std::fmt;
use std::path::PathBuf;

use qfcs_core::{Estimation, MfimParams, Preparation};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub estimation: EstimationConfig,
    pub filter: FilterConfig,
    pub cumulants: CumulantConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreparationMode {
    #[default]
    Exact,
    Trotter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(rename = "J")]
    pub coupling: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub t: f64,
    pub preparation: PreparationMode,
    /// Used only with `preparation = "trotter"`.
    pub trotter_steps: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            length: 12,
            coupling: 1.0,
            h_x: 1.0,
            h_z: 1.0,
            t: 1.0,
            preparation: PreparationMode::Exact,
            trotter_steps: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimationMode {
    #[default]
    Exact,
    Shots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimationConfig {
    pub mode: EstimationMode,
    /// Shots per circuit; each θ costs two circuits.
    pub shots: u64,
    /// Grid sizes swept by `distribution`, `filter` and `charfunc`.
    pub k_values: Vec<usize>,
    /// Sample over `N/gcd(support)` so even-only supports need half the points.
    pub parity_aware: bool,
    pub seed: u64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            mode: EstimationMode::Exact,
            shots: 1000,
            k_values: (1..=13).collect(),
            parity_aware: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Sectors to remove; absent means the two largest values `{L−2, L}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<u32>>,
    /// `N_c` for the time schedule.
    pub center: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CumulantConfig {
    pub h_values: Vec<f64>,
    /// Richardson rounds; every `R` in `0..=rounds` is reported.
    pub rounds: u32,
}

impl Default for CumulantConfig {
    fn default() -> Self {
        Self {
            h_values: default_h_sweep(),
            rounds: 2,
        }
    }
}

/// Thirteen points, four per decade, from 1e-3 to 1.
pub fn default_h_sweep() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Output file; stdout when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params()?;
        let err = |msg: String| Err(ConfigError(msg));
        if self.model.preparation == PreparationMode::Trotter && self.model.trotter_steps == 0 {
            return err("model.trotter_steps must be >= 1".into());
        }
        if self.estimation.mode == EstimationMode::Shots && self.estimation.shots == 0 {
            return err("estimation.shots must be >= 1 in shot mode".into());
        }
        if let Some(&k) = self.estimation.k_values.iter().find(|&&k| k == 0) {
            return err(format!("estimation.k_values must be >= 1, got {k}"));
        }
        if let Some(h) = self.cumulants.h_values.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return err(format!("cumulants.h_values must be positive, got {h}"));
        }
        if let Some(targets) = &self.filter.targets {
            if let Some(t) = targets.iter().find(|&&t| t as usize > self.model.length || t % 2 == 1) {
                return err(format!("filter target {t} is not a domain-wall count for L = {}", self.model.length));
            }
        }
        if self.filter.center as usize > self.model.length || self.filter.center % 2 == 1 {
            return err(format!("filter.center {} is not a domain-wall count", self.filter.center));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<MfimParams, ConfigError> {
        let m = &self.model;
        MfimParams::new(m.length, m.coupling, m.h_x, m.h_z, m.t).map_err(|e| ConfigError(format!("[model] {e}")))
    }

    pub fn preparation(&self) -> Preparation {
        match self.model.preparation {
            PreparationMode::Exact => Preparation::Exact,
            PreparationMode::Trotter => Preparation::Trotter {
                steps: self.model.trotter_steps,
            },
        }
    }

    pub fn estimation(&self) -> Estimation {
        match self.estimation.mode {
            EstimationMode::Exact => Estimation::Exact,
            EstimationMode::Shots => Estimation::Shots(self.estimation.shots),
        }
    }

    pub fn filter_targets(&self) -> Vec<u32> {
        let l = self.model.length as u32;
        self.filter.targets.clone().unwrap_or_else(|| vec![l - 2, l])
    }

    /// The configuration as TOML, for provenance headers.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference_setting() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.params().unwrap(), MfimParams::default());
        assert_eq!(c.filter_targets(), vec![10, 12]);
        assert_eq!(c.estimation(), Estimation::Exact);
    }

    #[test]
    fn single_override() {
        let c = parse_config("[model]\nL = 8\n").unwrap();
        assert_eq!(c.model.length, 8);
        assert_eq!(c.model.coupling, 1.0);
        assert_eq!(c.filter_targets(), vec![6, 8]);
    }

    #[test]
    fn odd_length_rejected() {
        let e = parse_config("[model]\nL = 7\n").unwrap_err();
        assert!(e.0.contains("even"), "{e}");
    }

    #[test]
    fn unknown_keys_and_bad_types() {
        assert!(parse_config("[model]\nLL = 8\n").is_err());
        assert!(parse_config("[plot]\nx = 1\n").is_err());
        assert!(parse_config("[model]\nL = \"twelve\"\n").is_err());
        assert!(parse_config("[estimation]\nmode = \"shots\"\nshots = 0\n").is_err());
        assert!(parse_config("[estimation]\nk_values = [0, 3]\n").is_err());
    }

    #[test]
    fn syntax_error_names_the_line() {
        let e = parse_config("# comment\n[model]\nL = = 4\n").unwrap_err();
        assert!(e.0.contains("line 3"), "{e}");
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config("[estimation]\nmode = \"shots\"\nshots = 50\n[filter]\ntargets = [12]\n").unwrap();
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn default_h_sweep_spans_three_decades() {
        let h = default_h_sweep();
        assert!((h[0] - 1e-3).abs() < 1e-15);
        assert!((h[12] - 1.0).abs() < 1e-12);
    }
}
