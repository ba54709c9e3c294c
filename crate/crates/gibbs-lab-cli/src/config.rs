//! Experiment configuration: one flat UTF-8 JSON document with dotted
//! key namespaces (for example `"problem.n": 10`). Unknown keys are
//! rejected, never ignored.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Flat key-value config with consumption tracking: every key must be
/// claimed by the command schema or validation fails.
#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
    consumed: Vec<String>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> CliResult<Self> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        let Value::Object(map) = root else {
            return Err(CliError::Config("config must be a JSON object".into()));
        };
        let mut values = BTreeMap::new();
        for (k, v) in map {
            if v.is_object() {
                return Err(CliError::Config(format!(
                    "key {k:?}: nested objects are not allowed; use dotted keys"
                )));
            }
            values.insert(k, v);
        }
        Ok(Self { values, consumed: Vec::new() })
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        let v = self.values.remove(key);
        if v.is_some() {
            self.consumed.push(key.to_string());
        }
        v
    }

    pub fn f64(&mut self, key: &str, default: f64) -> CliResult<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CliError::Config(format!("key {key:?} must be a number"))),
        }
    }

    pub fn usize(&mut self, key: &str, default: usize) -> CliResult<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| CliError::Config(format!("key {key:?} must be a non-negative integer"))),
        }
    }

    pub fn u64_opt(&mut self, key: &str) -> CliResult<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| CliError::Config(format!("key {key:?} must be a non-negative integer"))),
        }
    }

    pub fn bool(&mut self, key: &str, default: bool) -> CliResult<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .as_bool()
                .ok_or_else(|| CliError::Config(format!("key {key:?} must be a boolean"))),
        }
    }

    pub fn string(&mut self, key: &str, default: &str) -> CliResult<String> {
        match self.take(key) {
            None => Ok(default.to_string()),
            Some(v) => v
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| CliError::Config(format!("key {key:?} must be a string"))),
        }
    }

    pub fn f64_array(&mut self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| CliError::Config(format!("key {key:?} must hold numbers")))
                })
                .collect(),
            Some(_) => Err(CliError::Config(format!("key {key:?} must be an array of numbers"))),
        }
    }

    pub fn usize_array(&mut self, key: &str, default: &[usize]) -> CliResult<Vec<usize>> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_u64().map(|x| x as usize).ok_or_else(|| {
                        CliError::Config(format!("key {key:?} must hold non-negative integers"))
                    })
                })
                .collect(),
            Some(_) => Err(CliError::Config(format!("key {key:?} must be an array of integers"))),
        }
    }

    /// A vector parameter: a plain number is broadcast to dimension `d`,
    /// an array must have length `d`.
    pub fn vector(&mut self, key: &str, d: usize, default: f64) -> CliResult<Vec<f64>> {
        match self.take(key) {
            None => Ok(vec![default; d]),
            Some(Value::Array(items)) => {
                if items.len() != d {
                    return Err(CliError::Config(format!(
                        "key {key:?} must have {d} entries, got {}",
                        items.len()
                    )));
                }
                items
                    .iter()
                    .map(|v| {
                        v.as_f64().ok_or_else(|| {
                            CliError::Config(format!("key {key:?} must hold numbers"))
                        })
                    })
                    .collect()
            }
            Some(v) => v
                .as_f64()
                .map(|x| vec![x; d])
                .ok_or_else(|| CliError::Config(format!("key {key:?} must be a number or array"))),
        }
    }

    /// Fails if any key was never consumed by the command schema.
    pub fn finish(self) -> CliResult<()> {
        if self.values.is_empty() {
            return Ok(());
        }
        let unknown: Vec<&str> = self.values.keys().map(String::as_str).collect();
        Err(CliError::Config(format!("unknown config keys: {}", unknown.join(", "))))
    }
}

/// The Gaussian mean problem block shared by several commands.
#[derive(Debug, Clone)]
pub struct GaussianProblemConfig {
    pub d: usize,
    pub n: usize,
    pub mu: Vec<f64>,
    pub mu0: Vec<f64>,
    pub sigma0_sq: f64,
    pub sigmaz_sq: f64,
    pub sigma_sq: f64,
}

impl GaussianProblemConfig {
    pub fn read(cfg: &mut Config, default_d: usize, default_n: usize) -> CliResult<Self> {
        let d = cfg.usize("problem.d", default_d)?;
        let n = cfg.usize("problem.n", default_n)?;
        Ok(Self {
            d,
            n,
            mu: cfg.vector("problem.mu", d, 0.0)?,
            mu0: cfg.vector("problem.mu0", d, 0.0)?,
            sigma0_sq: cfg.f64("problem.sigma0_sq", 1.0)?,
            sigmaz_sq: cfg.f64("problem.sigmaZ_sq", 1.0)?,
            sigma_sq: cfg.f64("problem.sigma_sq", 1.0)?,
        })
    }

    pub fn build(&self) -> CliResult<gibbs_lab::gaussian_mean::GaussianMeanProblem> {
        gibbs_lab::gaussian_mean::GaussianMeanProblem::new(
            self.d,
            self.n,
            self.mu.clone(),
            self.mu0.clone(),
            self.sigma0_sq,
            self.sigmaz_sq,
            self.sigma_sq,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Same problem at a different sample count.
    pub fn build_at_n(&self, n: usize) -> CliResult<gibbs_lab::gaussian_mean::GaussianMeanProblem> {
        gibbs_lab::gaussian_mean::GaussianMeanProblem::new(
            self.d,
            n,
            self.mu.clone(),
            self.mu0.clone(),
            self.sigma0_sq,
            self.sigmaz_sq,
            self.sigma_sq,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let mut cfg = Config::from_str(r#"{"instances": 5, "bogus.key": 1}"#).unwrap();
        let _ = cfg.usize("instances", 100).unwrap();
        let err = cfg.finish().unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("bogus.key"));
    }

    #[test]
    fn nested_objects_are_rejected() {
        assert!(Config::from_str(r#"{"problem": {"n": 10}}"#).is_err());
    }

    #[test]
    fn vectors_broadcast_scalars() {
        let mut cfg = Config::from_str(r#"{"problem.mu": 2.5}"#).unwrap();
        assert_eq!(cfg.vector("problem.mu", 3, 0.0).unwrap(), vec![2.5, 2.5, 2.5]);
        let mut cfg = Config::from_str(r#"{"problem.mu": [1.0, 2.0]}"#).unwrap();
        assert_eq!(cfg.vector("problem.mu", 2, 0.0).unwrap(), vec![1.0, 2.0]);
        let mut cfg = Config::from_str(r#"{"problem.mu": [1.0, 2.0]}"#).unwrap();
        assert!(cfg.vector("problem.mu", 3, 0.0).is_err());
    }
}
