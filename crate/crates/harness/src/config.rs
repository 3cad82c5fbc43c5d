//! Experiment configuration, read from a single TOML document.

use std::path::{Path, PathBuf};

use mfl_core::bounds::RateSpec;
use mfl_core::manybody::DEFAULT_MEMORY_CAP;
use mfl_core::model::ModelSpec;
use mfl_core::onebody::step_count;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, HarnessResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds the random-state suites; copied into every output directory.
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default = "default_cap")]
    pub memory_cap: u64,
    pub model: ModelSpec,
    pub run: RunConfig,
    pub initial: InitialData,
    pub ladder: LadderConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsConfig>,
    #[serde(default)]
    pub lemmas: LemmaConfig,
}

fn default_cap() -> u64 {
    DEFAULT_MEMORY_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub horizon: f64,
    pub dt: f64,
    /// Report every `stride`-th step.
    pub stride: usize,
}

/// Gaussian packet for Φ₀; the confined factor is the configured mode χ_m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    pub center: Vec<f64>,
    pub width: f64,
    pub momentum: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Alpha,
    #[default]
    Beta,
}

/// How ε follows N along a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum EpsilonRule {
    /// Keep the model's ε.
    Fixed,
    /// `ε(N) = N^{-ν}`
    Power { nu: f64 },
    /// One ε per ladder entry.
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub n_values: Vec<usize>,
    pub epsilon: EpsilonRule,
    #[serde(default)]
    pub functional: Functional,
    /// RMS log residual above which no slope is reported.
    #[serde(default = "default_threshold")]
    pub residual_threshold: f64,
}

fn default_threshold() -> f64 {
    0.1
}

impl LadderConfig {
    pub fn epsilons(&self, model_eps: f64) -> Vec<f64> {
        match &self.epsilon {
            EpsilonRule::Fixed => vec![model_eps; self.n_values.len()],
            EpsilonRule::Power { nu } => self.n_values.iter().map(|&n| (n as f64).powf(-nu)).collect(),
            EpsilonRule::Explicit { values } => values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub rate: RateSpec,
    /// Envelope constant; fitted when absent (ignored for the explicit θ = 0 bound).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

/// Sizes for the random-state invariant suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    pub dim: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub states: usize,
    pub qs_states: usize,
    pub tolerance: f64,
    /// Negative control: scale φ off the unit sphere.
    pub corrupt_condensate: bool,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            dim: 4,
            n_min: 2,
            n_max: 5,
            states: 100,
            qs_states: 50,
            tolerance: 1e-9,
            corrupt_condensate: false,
        }
    }
}

impl LemmaConfig {
    pub fn validate(&self) -> HarnessResult<()> {
        if self.dim < 2 || self.n_min < 2 || self.n_max < self.n_min || self.n_max > 6 {
            return Err(HarnessError::Config(
                "lemmas need dim >= 2 and 2 <= n_min <= n_max <= 6".into(),
            ));
        }
        if self.states == 0 || !(self.tolerance > 0.0) {
            return Err(HarnessError::Config("lemmas need states > 0 and a positive tolerance".into()));
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> HarnessResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> HarnessResult<String> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> HarnessResult<()> {
        self.model.validate()?;
        let r = &self.run;
        if !(r.horizon > 0.0) || r.stride == 0 {
            return Err(HarnessError::Config("run needs horizon > 0 and stride >= 1".into()));
        }
        step_count(r.horizon, r.dt)?;
        let df = self.model.domain.free.dim();
        let i = &self.initial;
        if i.center.len() != df || i.momentum.len() != df || !(i.width > 0.0) {
            return Err(HarnessError::Config(format!(
                "initial data needs {df}-component center and momentum and a positive width"
            )));
        }
        let l = &self.ladder;
        if l.n_values.is_empty() {
            return Err(HarnessError::Config("ladder.n_values is empty".into()));
        }
        if l.n_values.contains(&0) {
            return Err(HarnessError::Config("ladder entries must be positive".into()));
        }
        if let EpsilonRule::Explicit { values } = &l.epsilon {
            if values.len() != l.n_values.len() {
                return Err(HarnessError::Config("ladder.epsilon.values must match n_values".into()));
            }
        }
        if l.epsilons(self.model.epsilon()).iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(HarnessError::Config("ladder ε values must be positive".into()));
        }
        if !(l.residual_threshold > 0.0) {
            return Err(HarnessError::Config("residual_threshold must be positive".into()));
        }
        if let Some(b) = &self.bounds {
            b.rate.validate()?;
        }
        self.lemmas.validate()
    }

    /// Copy with `n_particles` and ε replaced.
    pub fn model_at(&self, n: usize, epsilon: f64) -> ModelSpec {
        let mut m = self.model.clone();
        m.n_particles = n;
        m.domain.confined.epsilon = epsilon;
        if let EpsilonRule::Power { nu } = self.ladder.epsilon {
            m.nu = Some(nu);
        }
        m
    }
}
