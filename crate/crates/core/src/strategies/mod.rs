//! Benchmark selection strategies.

pub mod exhaustive;
pub mod optimal;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, SatellitePosition, Vec3};

pub use exhaustive::{exhaustive_optimum, ExhaustiveOptimum};
pub use optimal::{
    grid_search, largest_remainder, optimal_search, optimal_shares, polish_counts, project_to_simplex, OptimalSearch,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Evolutionary,
    Optimal,
    Random,
    Nearest,
    Fixed,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Optimal,
        StrategyKind::Evolutionary,
        StrategyKind::Random,
        StrategyKind::Nearest,
        StrategyKind::Fixed,
    ];

    /// Stable identifier used on the command line and in output files.
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Evolutionary => "evolutionary",
            StrategyKind::Optimal => "optimal",
            StrategyKind::Random => "random",
            StrategyKind::Nearest => "nearest",
            StrategyKind::Fixed => "fixed",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config("strategy", format!("unknown strategy `{s}`")))
    }
}

/// Per-device assignment for the position-driven arms (random, nearest, fixed).
pub fn assign<R: Rng + ?Sized>(
    kind: StrategyKind,
    fixed_target: usize,
    devices: &[Vec3],
    sats: &[SatellitePosition],
    rng: &mut R,
) -> Result<Vec<usize>> {
    let m = sats.len();
    if m == 0 {
        return Err(Error::config("satellites", "need at least one satellite"));
    }
    match kind {
        StrategyKind::Random => Ok(devices.iter().map(|_| rng.random_range(0..m)).collect()),
        StrategyKind::Nearest => Ok(devices
            .iter()
            .map(|d| {
                let mut best = 0;
                let mut best_dist = f64::INFINITY;
                for (i, s) in sats.iter().enumerate() {
                    let dist = distance(d, &s.position);
                    if dist < best_dist {
                        best = i;
                        best_dist = dist;
                    }
                }
                best
            })
            .collect()),
        StrategyKind::Fixed => {
            if fixed_target >= m {
                return Err(Error::config("fixed_target", format!("target {fixed_target} out of range 0..{m}")));
            }
            Ok(vec![fixed_target; devices.len()])
        }
        StrategyKind::Evolutionary | StrategyKind::Optimal => {
            Err(Error::config("strategy", format!("`{kind}` is computed from the scenario model, not from positions")))
        }
    }
}
