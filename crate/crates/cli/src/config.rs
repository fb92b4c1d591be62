//! Scenario files: one TOML document per experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::measure::MeasureDecl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    KacriceSweep,
    ZeroMc,
    IntegrandProfile,
    Szclt,
    Hypotheses,
    CovarianceCheck,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::KacriceSweep => "kacrice_sweep",
            Task::ZeroMc => "zero_mc",
            Task::IntegrandProfile => "integrand_profile",
            Task::Szclt => "szclt",
            Task::Hypotheses => "hypotheses",
            Task::CovarianceCheck => "covariance_check",
        }
    }
}

pub const DEFAULT_DEGREES: [usize; 4] = [64, 256, 1024, 4096];
pub const DEFAULT_REPLICATES: usize = 200;
/// Pooled covariance checks need at least this many draws.
pub const MIN_COVARIANCE_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub measure: MeasureDecl,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub tasks: Vec<Task>,
    /// Relative paths resolve against the scenario file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Base point of the localized covariance check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Replaces the theoretical limit in the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_limit: Option<f64>,
    #[serde(default)]
    pub dump_samples: bool,
}

fn default_degrees() -> Vec<usize> {
    DEFAULT_DEGREES.to_vec()
}

fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Reads and validates a scenario file; returns it with the directory
    /// relative paths resolve against.
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Self::from_toml(&text).map_err(|e| CliError::parse(path, e.message()))?;
        config.validate()?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(CliError::config("name", "must be nonempty and use only [A-Za-z0-9_-]"));
        }
        if self.degrees.is_empty() {
            return Err(CliError::config("degrees", "must be nonempty"));
        }
        if self.degrees[0] == 0 {
            return Err(CliError::config("degrees", "degrees must be positive"));
        }
        if self.degrees.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("degrees", "must be strictly increasing"));
        }
        if self.tasks.is_empty() {
            return Err(CliError::config("tasks", "at least one task is required"));
        }
        let mut seen = self.tasks.clone();
        seen.sort();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::config(
                "tasks",
                format!("'{}' is listed twice", w[0].as_str()),
            ));
        }
        if self.tasks.contains(&Task::ZeroMc) && self.replicates < 2 {
            return Err(CliError::config(
                "replicates",
                "zero_mc needs at least two replicates for a standard error",
            ));
        }
        if self.tasks.contains(&Task::CovarianceCheck) && self.replicates < MIN_COVARIANCE_SAMPLES {
            return Err(CliError::config(
                "replicates",
                format!("covariance_check needs at least {MIN_COVARIANCE_SAMPLES} replicates"),
            ));
        }
        if let Some(t) = &self.t_grid {
            if t.is_empty() || t.iter().any(|v| !v.is_finite()) {
                return Err(CliError::config("t_grid", "must be a nonempty list of finite numbers"));
            }
        }
        for (field, v) in [("eta", self.eta), ("gamma", self.gamma)] {
            if v.is_some_and(|v| !(v > 0.0) || !v.is_finite()) {
                return Err(CliError::config(field, "must be positive"));
            }
        }
        if self.x0.is_some_and(|v| !v.is_finite()) {
            return Err(CliError::config("x0", "must be finite"));
        }
        if self.predicted_limit.is_some_and(|v| !v.is_finite()) {
            return Err(CliError::config("predicted_limit", "must be finite"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, independent of file formatting.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        name = "box"
        tasks = ["kacrice_sweep"]
        [measure.density]
        kind = "box"
        a = "pi/2"
    "#;

    #[test]
    fn defaults() {
        let c = ScenarioConfig::from_toml(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.degrees, DEFAULT_DEGREES);
        assert_eq!(c.replicates, DEFAULT_REPLICATES);
        assert!(!c.dump_samples);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ScenarioConfig::from_toml(MINIMAL).unwrap();
        let b = ScenarioConfig::from_toml(&MINIMAL.replace("  ", "\t")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.master_seed = 1;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn invalid_configs_name_the_field() {
        let cases = [
            ("degrees = [64, 32]\n", "degrees"),
            ("degrees = []\n", "degrees"),
            ("replicates = 10\ntasks = [\"covariance_check\"]\n", "replicates"),
            ("tasks = [\"zero_mc\", \"zero_mc\"]\n", "tasks"),
            ("gamma = -1.0\n", "gamma"),
        ];
        for (prefix, field) in cases {
            let text = MINIMAL.replace("tasks = [\"kacrice_sweep\"]\n", "");
            let text = if prefix.contains("tasks") {
                format!("{prefix}{text}")
            } else {
                format!("{prefix}tasks = [\"kacrice_sweep\"]\n{text}")
            };
            let c = ScenarioConfig::from_toml(&text).unwrap();
            match c.validate() {
                Err(CliError::Config { field: f, .. }) => assert_eq!(f, field, "{prefix}"),
                other => panic!("{prefix}: {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml(&format!("colour = 1\n{MINIMAL}")).is_err());
        assert!(ScenarioConfig::from_toml(&MINIMAL.replace("kacrice_sweep", "plot")).is_err());
    }
}
