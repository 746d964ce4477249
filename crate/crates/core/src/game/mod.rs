//! Evolutionary access-selection game.
//!
//! Devices choosing satellite `i` earn `alpha * C_i / (x_i N) - beta * D_i`.
//! The population share vector evolves either through the mean-field
//! replicator ODE ([`replicator`]) or through per-device probabilistic
//! migration ([`agent`]).

pub mod agent;
pub mod replicator;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::secrecy::SecrecyReport;

pub use agent::{agent_based_round, run_agent, AgentRun};
pub use replicator::{euler_update, replicator_step, run_replicator};

/// Tolerance on the simplex constraint for externally supplied shares.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    pub shares: Vec<f64>,
    pub n_devices: usize,
    pub round: u64,
}

impl PopulationState {
    pub fn new(shares: Vec<f64>, n_devices: usize) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::config("shares", "need at least one satellite"));
        }
        if shares.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::config("shares", "each share must lie in [0, 1]"));
        }
        let total: f64 = shares.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::config("shares", format!("shares sum to {total}, expected 1")));
        }
        Ok(Self { shares, n_devices, round: 0 })
    }

    pub fn uniform(num_satellites: usize, n_devices: usize) -> Self {
        Self { shares: vec![1.0 / num_satellites as f64; num_satellites], n_devices, round: 0 }
    }

    /// Empirical shares of an integer assignment.
    pub fn from_counts(counts: &[usize]) -> Self {
        let n: usize = counts.iter().sum();
        let shares = counts.iter().map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 }).collect();
        Self { shares, n_devices: n, round: 0 }
    }

    pub fn num_satellites(&self) -> usize {
        self.shares.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UtilityWeights {
    /// Weight on per-device secrecy capacity, per bit/s.
    pub alpha: f64,
    /// Weight on queuing delay, per second.
    pub beta: f64,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        Self { alpha: 2e-5, beta: 1.0 }
    }
}

impl UtilityWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::config("weights.alpha", "must be >= 0"));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::config("weights.beta", "must be >= 0"));
        }
        if self.alpha == 0.0 && self.beta == 0.0 {
            return Err(Error::config("weights", "alpha and beta cannot both be zero"));
        }
        Ok(())
    }
}

/// How a migrating device picks its new satellite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MigrationTarget {
    /// Proportional to the utility surplus over the average.
    Surplus,
    /// Uniform over above-average satellites.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameConfig {
    pub learning_rate: f64,
    pub time_step: f64,
    pub max_rounds: u64,
    pub equilibrium_tolerance: f64,
    pub min_share_floor: f64,
    pub move_probability: f64,
    pub migration_target: MigrationTarget,
    pub rng_seed: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            time_step: 0.01,
            max_rounds: 200_000,
            equilibrium_tolerance: 1e-6,
            min_share_floor: 1e-6,
            move_probability: 0.02,
            migration_target: MigrationTarget::Surplus,
            rng_seed: 0,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("game.learning_rate", "must be > 0"));
        }
        if !(self.time_step > 0.0) {
            return Err(Error::config("game.time_step", "must be > 0"));
        }
        if !(self.equilibrium_tolerance > 0.0) {
            return Err(Error::config("game.equilibrium_tolerance", "must be > 0"));
        }
        if !(self.min_share_floor >= 0.0 && self.min_share_floor < 1.0) {
            return Err(Error::config("game.min_share_floor", "must lie in [0, 1)"));
        }
        if !(self.move_probability > 0.0 && self.move_probability <= 1.0) {
            return Err(Error::config("game.move_probability", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityProfile {
    pub per_satellite: Vec<f64>,
    pub average: f64,
}

/// What a satellite offers at a given population state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteMetrics {
    pub report: SecrecyReport,
    pub delay: f64,
}

/// Maps a population state to per-satellite secrecy and delay.
pub trait SatelliteModel: Sync {
    fn num_satellites(&self) -> usize;
    fn evaluate(&self, state: &PopulationState) -> Vec<SatelliteMetrics>;
}

/// Adapter turning a closure into a [`SatelliteModel`].
pub struct ClosureModel<F> {
    num_satellites: usize,
    f: F,
}

impl<F> ClosureModel<F>
where
    F: Fn(&PopulationState) -> Vec<SatelliteMetrics> + Sync,
{
    pub fn new(num_satellites: usize, f: F) -> Self {
        Self { num_satellites, f }
    }
}

impl<F> SatelliteModel for ClosureModel<F>
where
    F: Fn(&PopulationState) -> Vec<SatelliteMetrics> + Sync,
{
    fn num_satellites(&self) -> usize {
        self.num_satellites
    }

    fn evaluate(&self, state: &PopulationState) -> Vec<SatelliteMetrics> {
        (self.f)(state)
    }
}

/// Utility of one device on satellite `sat`.
///
/// The per-device secrecy term divides by `max(x_i, share_floor) * N`, so
/// an empty satellite is scored as if the device were (nearly) alone there.
pub fn utility(
    sat: usize,
    state: &PopulationState,
    secrecy: &SecrecyReport,
    delay: f64,
    weights: &UtilityWeights,
    share_floor: f64,
) -> f64 {
    let share = state.shares[sat].max(share_floor);
    let per_device = if share > 0.0 && state.n_devices > 0 {
        secrecy.secrecy_capacity / (share * state.n_devices as f64)
    } else {
        // nobody to share with: the lone device's view
        secrecy.secrecy_capacity
    };
    weights.alpha * per_device - weights.beta * delay
}

pub fn utility_profile(
    state: &PopulationState,
    reports: &[SecrecyReport],
    delays: &[f64],
    weights: &UtilityWeights,
    share_floor: f64,
) -> Result<UtilityProfile> {
    let m = state.num_satellites();
    if reports.len() != m || delays.len() != m {
        return Err(Error::config(
            "satellites",
            format!("length mismatch: {m} shares, {} reports, {} delays", reports.len(), delays.len()),
        ));
    }
    let per_satellite: Vec<f64> =
        (0..m).map(|i| utility(i, state, &reports[i], delays[i], weights, share_floor)).collect();
    let average = state.shares.iter().zip(&per_satellite).map(|(x, p)| x * p).sum();
    Ok(UtilityProfile { per_satellite, average })
}

/// True when every supported strategy earns the average utility within
/// `equilibrium_tolerance * max(1, |average|)`.
pub fn equilibrium_detected(profile: &UtilityProfile, state: &PopulationState, config: &GameConfig) -> bool {
    equilibrium_gap(profile, state, config.min_share_floor)
        <= config.equilibrium_tolerance * profile.average.abs().max(1.0)
}

/// Largest `|pi_i - average|` over strategies with share above `floor`.
pub fn equilibrium_gap(profile: &UtilityProfile, state: &PopulationState, floor: f64) -> f64 {
    profile
        .per_satellite
        .iter()
        .zip(&state.shares)
        .filter(|(_, x)| **x > floor)
        .map(|(p, _)| (p - profile.average).abs())
        .fold(0.0, f64::max)
}

/// A model together with the weights and dynamics settings used to play it.
pub struct Game<'a> {
    pub model: &'a dyn SatelliteModel,
    pub weights: UtilityWeights,
    pub config: GameConfig,
}

impl<'a> Game<'a> {
    pub fn new(model: &'a dyn SatelliteModel, weights: UtilityWeights, config: GameConfig) -> Self {
        Self { model, weights, config }
    }

    pub fn profile(&self, state: &PopulationState) -> Result<UtilityProfile> {
        let metrics = self.model.evaluate(state);
        let reports: Vec<SecrecyReport> = metrics.iter().map(|m| m.report).collect();
        let delays: Vec<f64> = metrics.iter().map(|m| m.delay).collect();
        utility_profile(state, &reports, &delays, &self.weights, self.config.min_share_floor)
    }

    /// System average utility at `state`.
    pub fn average_utility(&self, state: &PopulationState) -> Result<f64> {
        Ok(self.profile(state)?.average)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub state: PopulationState,
    pub profile: UtilityProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub converged: bool,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory holds at least the initial point")
    }
}
