//! Mean-field replicator dynamics, explicit Euler in time.

use super::{equilibrium_detected, Game, GameConfig, PopulationState, Trajectory, TrajectoryPoint, UtilityProfile};
use crate::error::Result;

/// Raw Euler update `x + dt * sigma * x * (pi - avg)`, before flooring.
pub fn euler_update(state: &PopulationState, profile: &UtilityProfile, config: &GameConfig) -> Vec<f64> {
    let rate = config.time_step * config.learning_rate;
    state.shares.iter().zip(&profile.per_satellite).map(|(x, pi)| x + rate * x * (pi - profile.average)).collect()
}

/// One replicator step: Euler update, floor at `min_share_floor`, renormalise.
pub fn replicator_step(state: &PopulationState, profile: &UtilityProfile, config: &GameConfig) -> PopulationState {
    let mut shares = euler_update(state, profile, config);
    for x in shares.iter_mut() {
        *x = x.max(config.min_share_floor);
    }
    let total: f64 = shares.iter().sum();
    for x in shares.iter_mut() {
        *x /= total;
    }
    PopulationState { shares, n_devices: state.n_devices, round: state.round + 1 }
}

/// Iterates the replicator from `initial` until equilibrium or `max_rounds`.
///
/// Utilities are recomputed from the model at every step.
pub fn run_replicator(initial: &PopulationState, game: &Game<'_>) -> Result<Trajectory> {
    let mut state = initial.clone();
    let mut points = Vec::new();
    loop {
        let profile = game.profile(&state)?;
        let done = equilibrium_detected(&profile, &state, &game.config);
        let next = if done || state.round >= game.config.max_rounds {
            None
        } else {
            Some(replicator_step(&state, &profile, &game.config))
        };
        points.push(TrajectoryPoint { state, profile });
        match next {
            Some(s) => state = s,
            None => return Ok(Trajectory { points, converged: done }),
        }
    }
}
