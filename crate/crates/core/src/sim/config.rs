//! Experiment descriptions read from JSON.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::catalog::{Arity, TestSpec};
use crate::dist::DistSpec;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_N_MAX: u64 = 10_000;
pub const DEFAULT_TRIALS: u64 = 200;
pub const DEFAULT_CHECKPOINTS: usize = 50;

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_n_max() -> u64 {
    DEFAULT_N_MAX
}
fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

/// Where the observations of one trial come from.
///
/// One-sample tests draw from `x`; two-sample tests draw `(x, y)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub x: DistSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<DistSpec>,
}

/// A grid of tests crossed with data scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_trials")]
    pub n_trials: u64,
    /// Steps at which power is recorded; a log-spaced grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default)]
    pub master_seed: u64,
    pub tests: Vec<TestSpec>,
    pub scenarios: Vec<Scenario>,
}

/// `k` roughly log-spaced integers from 1 to `n_max`, deduplicated, always
/// ending at `n_max`.
pub fn log_checkpoints(n_max: u64, k: usize) -> Vec<u64> {
    if n_max == 0 {
        return Vec::new();
    }
    let k = k.max(2);
    let top = (n_max as f64).ln();
    let mut out: Vec<u64> = (0..k)
        .map(|i| (top * i as f64 / (k - 1) as f64).exp().round() as u64)
        .map(|n| n.clamp(1, n_max))
        .collect();
    out.push(n_max);
    out.sort_unstable();
    out.dedup();
    out
}

fn safe_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !s.starts_with('.')
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checkpoints in force: the configured list cut at `n_max`, or the
    /// default log grid.
    pub fn resolved_checkpoints(&self) -> Vec<u64> {
        match &self.checkpoints {
            Some(c) => c.iter().copied().filter(|&n| n <= self.n_max).collect(),
            None => log_checkpoints(self.n_max, DEFAULT_CHECKPOINTS),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if !safe_name(&self.name) {
            return err(format!(
                "experiment name `{}` must be a plain file-name token",
                self.name
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return err(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.n_max == 0 {
            return err("n_max must be at least 1".into());
        }
        if self.n_trials == 0 {
            return err("n_trials must be at least 1".into());
        }
        if let Some(c) = &self.checkpoints {
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return err("checkpoints must be strictly increasing".into());
            }
            if c.first().is_some_and(|&n| n == 0) {
                return err("checkpoints start at 1".into());
            }
        }
        if self.tests.is_empty() || self.scenarios.is_empty() {
            return err("need at least one test and one scenario".into());
        }
        let mut labels = HashSet::new();
        for t in &self.tests {
            t.validate()?;
            if !labels.insert(t.label()) {
                return err(format!("test `{}` appears twice", t.label()));
            }
        }
        let mut names = HashSet::new();
        for s in &self.scenarios {
            if !safe_name(&s.name) {
                return err(format!(
                    "scenario name `{}` must be a plain file-name token",
                    s.name
                ));
            }
            if !names.insert(s.name.as_str()) {
                return err(format!("scenario `{}` appears twice", s.name));
            }
            s.x.validate()?;
            if let Some(y) = &s.y {
                y.validate()?;
                if y.dim() != s.x.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: s.x.dim(),
                        got: y.dim(),
                    });
                }
            }
            for t in &self.tests {
                if t.arity() == Arity::Two && s.y.is_none() {
                    return err(format!(
                        "scenario `{}` has no `y` but {} is a two-sample test",
                        s.name,
                        t.label()
                    ));
                }
            }
        }
        Ok(())
    }
}
