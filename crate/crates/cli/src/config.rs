//! TOML experiment files. Every field is optional; command-line flags win
//! over the file, and the file wins over built-in defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: Option<String>,
    pub noise: Option<String>,
    pub loss: Option<String>,
    /// Series length for `simulate` and `train`.
    pub n: Option<usize>,
    /// Sample sizes for `sweep`.
    pub ns: Option<Vec<usize>>,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub replicates: Option<usize>,
    pub mc_m: Option<usize>,
    pub seed: Option<u64>,
    pub force: Option<bool>,
    pub timing: Option<bool>,
    pub schedule: Option<ScheduleConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub form: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lambda_scale: Option<f64>,
    pub sigma_scale: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("malformed config {}: {e}", path.display())))
    }

    pub fn schedule(&self) -> ScheduleConfig {
        self.schedule.clone().unwrap_or_default()
    }
}

/// First present value, else the default.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// First present value, else a validation error naming the field.
pub fn require<T: Clone>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Validation(format!("`{name}` is required (flag or config file)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_sweep_file() {
        let c: ExperimentConfig = toml::from_str(
            r#"
            system = "tent"
            noise = "uniform:0.05"
            ns = [256, 1024]
            [schedule]
            form = "power"
            alpha = 0.1
            beta = 0.0
            "#,
        )
        .unwrap();
        assert_eq!(c.ns, Some(vec![256, 1024]));
        assert_eq!(c.schedule().alpha, Some(0.1));
        let back: ExperimentConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("sytem = \"tent\"").is_err());
    }

    #[test]
    fn flags_override_file() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick::<i32>(None, None, 3), 3);
        assert!(require::<i32>(None, None, "n").is_err());
    }
}
