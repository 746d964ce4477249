use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelConfig;
use crate::error::{Error, Result};
use crate::game::{GameConfig, UtilityWeights};
use crate::geometry::GeometryConfig;
use crate::queueing::QueueConfig;
use crate::secrecy::{QuadratureConfig, SecrecySettings};
use crate::strategies::StrategyKind;

/// Environment variable that replaces `master_seed` when set.
pub const SEED_ENV: &str = "SAGIN_SIM_SEED";

/// Where devices are dropped: a weight per serving satellite's coverage cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub cap_weights: Vec<f64>,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self { cap_weights: vec![0.4, 0.3, 0.2, 0.1] }
    }
}

/// Per-device secrecy demand, drawn uniformly from `[demand_min, demand_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RiskConfig {
    pub demand_min: f64,
    pub demand_max: f64,
    pub risk_exponent: f64,
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self { demand_min: 30_000.0, demand_max: 50_000.0, risk_exponent: 5e-5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionPath {
    /// Per-device probabilistic migration.
    Agent,
    /// Replicator ODE on shares, rounded to counts at the end.
    MeanField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub path: EvolutionPath,
    pub max_agent_rounds: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self { path: EvolutionPath::Agent, max_agent_rounds: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimalConfig {
    /// Lattice spacing `1 / grid_resolution` for the cross-check; 0 disables it.
    pub grid_resolution: usize,
}

impl Default for OptimalConfig {
    fn default() -> Self {
        Self { grid_resolution: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub devices: DeviceConfig,
    pub channel: ChannelConfig,
    pub queue: QueueConfig,
    pub weights: UtilityWeights,
    pub game: GameConfig,
    pub evolution: EvolutionConfig,
    pub quadrature: QuadratureConfig,
    pub secrecy: SecrecySettings,
    pub risk: RiskConfig,
    pub optimal: OptimalConfig,
    pub population_sizes: Vec<usize>,
    pub strategies: Vec<StrategyKind>,
    pub fixed_target: usize,
    pub replications: usize,
    pub output_path: PathBuf,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            devices: DeviceConfig::default(),
            channel: ChannelConfig::default(),
            queue: QueueConfig::default(),
            weights: UtilityWeights::default(),
            game: GameConfig::default(),
            evolution: EvolutionConfig::default(),
            quadrature: QuadratureConfig::default(),
            secrecy: SecrecySettings::default(),
            risk: RiskConfig::default(),
            optimal: OptimalConfig::default(),
            population_sizes: (1..=10).map(|k| k * 100).collect(),
            strategies: StrategyKind::ALL.to_vec(),
            fixed_target: 0,
            replications: 10,
            output_path: PathBuf::from("results.csv"),
            master_seed: 2024,
        }
    }
}

impl ExperimentConfig {
    pub fn num_satellites(&self) -> usize {
        self.geometry.num_serving
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        let m = self.num_satellites();
        self.channel.validate()?;
        self.queue.validate(m)?;
        self.weights.validate()?;
        self.game.validate()?;
        self.quadrature.validate()?;

        let w = &self.devices.cap_weights;
        if w.len() != m {
            return Err(Error::config(
                "devices.cap_weights",
                format!("expected {m} entries (geometry.num_serving), got {}", w.len()),
            ));
        }
        if w.iter().any(|x| !(*x >= 0.0)) || !(w.iter().sum::<f64>() > 0.0) {
            return Err(Error::config("devices.cap_weights", "weights must be >= 0 with a positive sum"));
        }

        let r = &self.risk;
        if !(r.demand_min >= 0.0) || !(r.demand_max >= r.demand_min) || !r.demand_max.is_finite() {
            return Err(Error::config("risk.demand_max", "need 0 <= demand_min <= demand_max < inf"));
        }
        if !(r.risk_exponent > 0.0) {
            return Err(Error::config("risk.risk_exponent", "must be > 0"));
        }
        if self.evolution.max_agent_rounds == 0 {
            return Err(Error::config("evolution.max_agent_rounds", "must be >= 1"));
        }

        if self.population_sizes.is_empty() {
            return Err(Error::config("population_sizes", "must not be empty"));
        }
        if let Some(n) = self.population_sizes.iter().find(|&&n| n < m) {
            return Err(Error::config("population_sizes", format!("size {n} is below the satellite count {m}")));
        }
        if self.strategies.is_empty() {
            return Err(Error::config("strategies", "must not be empty"));
        }
        if self.strategies.iter().collect::<BTreeSet<_>>().len() != self.strategies.len() {
            return Err(Error::config("strategies", "duplicate strategy"));
        }
        if self.fixed_target >= m {
            return Err(Error::config("fixed_target", format!("must be < {m}")));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "must be >= 1"));
        }
        Ok(())
    }

    /// Parses and validates without touching the environment.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let key = unknown_key(&message).unwrap_or_else(|| "config".to_string());
            Error::config(key, message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies an override value for `master_seed` as read from [`SEED_ENV`].
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.master_seed =
                v.trim().parse().map_err(|_| Error::config(SEED_ENV, format!("`{v}` is not an unsigned integer")))?;
        }
        Ok(())
    }
}

fn unknown_key(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Reads, validates and seeds a config; `SAGIN_SIM_SEED` wins over the file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cfg = ExperimentConfig::from_toml_str(&text)?;
    cfg.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
    Ok(cfg)
}
