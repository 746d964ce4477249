//! Brute-force optimum over every per-device assignment, for tiny instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, PopulationState};

/// Upper bound on `M^N` accepted by [`exhaustive_optimum`].
pub const MAX_ASSIGNMENTS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveOptimum {
    pub assignment: Vec<usize>,
    pub counts: Vec<usize>,
    pub average: f64,
    pub evaluated: u64,
}

/// Walks all `M^N` assignments in lexicographic order; the first maximum wins.
pub fn exhaustive_optimum(game: &Game<'_>, n_devices: usize) -> Result<ExhaustiveOptimum> {
    let m = game.model.num_satellites();
    if m == 0 || n_devices == 0 {
        return Err(Error::config("oracle", "need at least one device and one satellite"));
    }
    let total = (m as u64)
        .checked_pow(n_devices as u32)
        .filter(|t| *t <= MAX_ASSIGNMENTS)
        .ok_or_else(|| Error::config("oracle", format!("{m}^{n_devices} assignments is too many")))?;

    let mut assignment = vec![0usize; n_devices];
    let mut counts = vec![0usize; m];
    counts[0] = n_devices;
    let mut best = ExhaustiveOptimum {
        assignment: assignment.clone(),
        counts: counts.clone(),
        average: f64::NEG_INFINITY,
        evaluated: total,
    };
    for _ in 0..total {
        let f = game.average_utility(&PopulationState::from_counts(&counts))?;
        if f > best.average {
            best.average = f;
            best.assignment.clone_from(&assignment);
            best.counts.clone_from(&counts);
        }
        // odometer increment, last device fastest
        for slot in assignment.iter_mut().rev() {
            counts[*slot] -= 1;
            *slot = (*slot + 1) % m;
            counts[*slot] += 1;
            if *slot != 0 {
                break;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::testing::mm1_model;
    use crate::game::{GameConfig, UtilityWeights};

    #[test]
    fn symmetric_tiny_instance() {
        let model = mm1_model(vec![9.7e6; 3], vec![10.0; 3], 0.03);
        let game = Game::new(&model, UtilityWeights::default(), GameConfig::default());
        let best = exhaustive_optimum(&game, 6).unwrap();
        assert_eq!(best.counts, vec![2, 2, 2]);
        assert_eq!(best.evaluated, 729);
        assert_eq!(best.assignment, vec![0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn rejects_huge_instances() {
        let model = mm1_model(vec![1.0; 4], vec![10.0; 4], 0.03);
        let game = Game::new(&model, UtilityWeights::default(), GameConfig::default());
        assert!(exhaustive_optimum(&game, 40).is_err());
    }
}
