//! Distributed per-device selection rounds.
//!
//! Each round the satellites publish their connection counts, every device
//! derives the per-satellite utilities and the system average, and devices
//! on below-average satellites migrate with a fixed probability. Migration
//! decisions are drawn sequentially in device order from one generator, so
//! a seed fully determines the run.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{equilibrium_detected, Game, MigrationTarget, PopulationState, TrajectoryPoint, UtilityProfile};
use crate::error::{Error, Result};

/// Relative slack below which a utility counts as equal to the average.
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRun {
    pub assignments: Vec<usize>,
    pub points: Vec<TrajectoryPoint>,
    pub rounds: u64,
    pub converged: bool,
}

impl AgentRun {
    pub fn final_state(&self) -> &PopulationState {
        &self.points.last().expect("at least one round recorded").state
    }

    pub fn final_profile(&self) -> &UtilityProfile {
        &self.points.last().expect("at least one round recorded").profile
    }
}

pub fn counts(assignments: &[usize], num_satellites: usize) -> Vec<usize> {
    let mut c = vec![0usize; num_satellites];
    for &a in assignments {
        c[a] += 1;
    }
    c
}

fn state_of(assignments: &[usize], num_satellites: usize, round: u64) -> PopulationState {
    let mut s = PopulationState::from_counts(&counts(assignments, num_satellites));
    s.round = round;
    s
}

fn below_threshold(profile: &UtilityProfile) -> f64 {
    profile.average - TIE_EPSILON * profile.average.abs().max(1.0)
}

/// One timeslot. Returns the new assignments and the profile the devices
/// acted on.
pub fn agent_based_round<R: Rng + ?Sized>(
    assignments: &[usize],
    game: &Game<'_>,
    rng: &mut R,
) -> Result<(Vec<usize>, UtilityProfile)> {
    let m = game.model.num_satellites();
    if let Some(bad) = assignments.iter().find(|&&a| a >= m) {
        return Err(Error::config("assignments", format!("satellite index {bad} out of range 0..{m}")));
    }
    let state = state_of(assignments, m, 0);
    let profile = game.profile(&state)?;
    let threshold = below_threshold(&profile);

    let below: Vec<bool> = profile.per_satellite.iter().map(|p| *p < threshold).collect();
    let surplus: Vec<f64> = profile.per_satellite.iter().map(|p| (p - profile.average).max(0.0)).collect();
    let targets: Vec<usize> = (0..m).filter(|&j| surplus[j] > 0.0).collect();
    let total_surplus: f64 = targets.iter().map(|&j| surplus[j]).sum();

    let mut next = assignments.to_vec();
    if targets.is_empty() || !below.iter().any(|b| *b) {
        return Ok((next, profile));
    }

    for slot in next.iter_mut() {
        if !below[*slot] || rng.random::<f64>() >= game.config.move_probability {
            continue;
        }
        *slot = match game.config.migration_target {
            MigrationTarget::Uniform => targets[rng.random_range(0..targets.len())],
            MigrationTarget::Surplus => {
                let mut u = rng.random::<f64>() * total_surplus;
                let mut pick = *targets.last().expect("non-empty");
                for &j in &targets {
                    if u < surplus[j] {
                        pick = j;
                        break;
                    }
                    u -= surplus[j];
                }
                pick
            }
        };
    }
    Ok((next, profile))
}

/// Repeats [`agent_based_round`] until no device has a reason to move, the
/// equilibrium test passes, or `max_rounds` timeslots have run.
pub fn run_agent<R: Rng + ?Sized>(
    initial: Vec<usize>,
    game: &Game<'_>,
    max_rounds: u64,
    rng: &mut R,
) -> Result<AgentRun> {
    let m = game.model.num_satellites();
    let mut assignments = initial;
    let mut points = Vec::new();
    let mut round = 0u64;
    loop {
        let state = state_of(&assignments, m, round);
        let profile = game.profile(&state)?;
        let settled = equilibrium_detected(&profile, &state, &game.config);
        let threshold = below_threshold(&profile);
        let stuck = !profile.per_satellite.iter().zip(&state.shares).any(|(p, x)| *x > 0.0 && *p < threshold);
        points.push(TrajectoryPoint { state, profile });
        if settled || stuck || round >= max_rounds {
            return Ok(AgentRun { assignments, points, rounds: round, converged: settled });
        }
        assignments = agent_based_round(&assignments, game, rng)?.0;
        round += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::mm1_model;
    use super::super::{GameConfig, UtilityWeights};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_utilities_no_migration() {
        let model = mm1_model(vec![1e6; 4], vec![10.0; 4], 0.03);
        let game =
            Game::new(&model, UtilityWeights::default(), GameConfig { move_probability: 1.0, ..Default::default() });
        let start: Vec<usize> = (0..100).map(|i| i % 4).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (next, _) = agent_based_round(&start, &game, &mut rng).unwrap();
        assert_eq!(next, start);
    }

    #[test]
    fn single_device_single_satellite() {
        let model = mm1_model(vec![1e6], vec![10.0], 0.03);
        let game =
            Game::new(&model, UtilityWeights::default(), GameConfig { move_probability: 1.0, ..Default::default() });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (next, profile) = agent_based_round(&[0], &game, &mut rng).unwrap();
        assert_eq!(next, vec![0]);
        assert_eq!(profile.per_satellite.len(), 1);
    }

    #[test]
    fn out_of_range_assignment_rejected() {
        let model = mm1_model(vec![1e6; 2], vec![10.0; 2], 0.03);
        let game = Game::new(&model, UtilityWeights::default(), GameConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(agent_based_round(&[0, 2], &game, &mut rng).is_err());
    }

    #[test]
    fn only_below_average_devices_move() {
        let model = mm1_model(vec![1e6; 3], vec![10.0; 3], 0.03);
        let game =
            Game::new(&model, UtilityWeights::default(), GameConfig { move_probability: 1.0, ..Default::default() });
        let mut start = vec![0usize; 60];
        start.extend(vec![1usize; 20]);
        start.extend(vec![2usize; 20]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (next, profile) = agent_based_round(&start, &game, &mut rng).unwrap();
        assert!(profile.per_satellite[0] < profile.average);
        for (a, b) in start.iter().zip(&next) {
            if *a != 0 {
                assert_eq!(a, b);
            } else {
                assert_ne!(*b, 0);
            }
        }
    }

    #[test]
    fn uniform_target_mode_moves_to_above_average() {
        let model = mm1_model(vec![1e6; 3], vec![10.0; 3], 0.03);
        let cfg =
            GameConfig { move_probability: 1.0, migration_target: MigrationTarget::Uniform, ..Default::default() };
        let game = Game::new(&model, UtilityWeights::default(), cfg);
        let mut start = vec![0usize; 80];
        start.extend(vec![1usize; 10]);
        start.extend(vec![2usize; 10]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (next, _) = agent_based_round(&start, &game, &mut rng).unwrap();
        let c = counts(&next, 3);
        assert_eq!(c[0], 0);
        assert!(c[1] > 10 && c[2] > 10);
    }

    #[test]
    fn deterministic_given_seed() {
        let model = mm1_model(vec![9.7e6; 4], vec![10.0; 4], 0.03);
        let game = Game::new(&model, UtilityWeights::default(), GameConfig::default());
        let start: Vec<usize> = (0..400).map(|i| if i < 280 { 0 } else { 1 + i % 3 }).collect();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_agent(start.clone(), &game, 300, &mut rng).unwrap().assignments
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn symmetric_run_balances_load() {
        let model = mm1_model(vec![9.7e6; 4], vec![10.0; 4], 0.03);
        let game = Game::new(&model, UtilityWeights::default(), GameConfig::default());
        let start: Vec<usize> = (0..400).map(|i| if i < 280 { 0 } else { 1 + i % 3 }).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let run = run_agent(start, &game, 5000, &mut rng).unwrap();
        let c = counts(&run.assignments, 4);
        assert_eq!(c.iter().sum::<usize>(), 400);
        for x in &run.final_state().shares {
            assert!((x - 0.25).abs() < 0.03, "{c:?}");
        }
    }
}
