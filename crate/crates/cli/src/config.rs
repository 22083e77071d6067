//! `key = value` run configuration.

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config line {line}: {msg}")]
pub struct ConfigError {
    pub line: usize,
    pub msg: String,
}

/// Settings that may come from a config file; command-line flags win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub quad_n: Option<usize>,
    pub quad_l: Option<f64>,
    pub painleve_xmin: Option<f64>,
    pub painleve_xmax: Option<f64>,
    pub painleve_tol: Option<f64>,
    pub sim_seed: Option<u64>,
    pub sim_samples: Option<usize>,
    pub sim_threads: Option<usize>,
}

fn positive(v: f64, line: usize) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError { line, msg: format!("expected a positive number, got {v}") })
    }
}

impl RunConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| ConfigError { line, msg };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            let float = || match value.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(format!("`{key}` needs a finite number, got `{value}`"))),
            };
            let int = || value.parse::<u64>().map_err(|_| err(format!("`{key}` needs a non-negative integer, got `{value}`")));
            let count = || match int()? {
                0 => Err(err(format!("`{key}` must be at least 1"))),
                n => Ok(n as usize),
            };
            match key {
                "quad.n" => cfg.quad_n = Some(count()?),
                "quad.L" => cfg.quad_l = Some(positive(float()?, line)?),
                "painleve.xmin" => cfg.painleve_xmin = Some(float()?),
                "painleve.xmax" => cfg.painleve_xmax = Some(float()?),
                "painleve.tol" => cfg.painleve_tol = Some(positive(float()?, line)?),
                "sim.seed" => cfg.sim_seed = Some(int()?),
                "sim.samples" => cfg.sim_samples = Some(count()?),
                "sim.threads" => cfg.sim_threads = Some(count()?),
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if let (Some(a), Some(b)) = (cfg.painleve_xmin, cfg.painleve_xmax) {
            if a >= b {
                return Err(ConfigError { line: 0, msg: format!("painleve.xmin {a} must be below painleve.xmax {b}") });
            }
        }
        Ok(cfg)
    }
}
