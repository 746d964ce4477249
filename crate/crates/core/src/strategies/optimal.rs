//! Centralised benchmark: share vector maximising the system average utility.
//!
//! Projected gradient ascent on the simplex, cross-checked for small `M`
//! by an exhaustive lattice search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, PopulationState};

/// Lattice search is skipped above this many satellites.
pub const GRID_MAX_SATELLITES: usize = 4;

const MAX_ITERATIONS: usize = 20_000;
const FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSearch {
    pub state: PopulationState,
    pub average: f64,
    pub gradient_average: f64,
    pub grid_average: Option<f64>,
}

fn objective(game: &Game<'_>, shares: &[f64], n: usize) -> Result<f64> {
    game.average_utility(&PopulationState { shares: shares.to_vec(), n_devices: n, round: 0 })
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn gradient(game: &Game<'_>, x: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + FD_STEP;
        let up = objective(game, &probe, n)?;
        probe[i] = x[i] - FD_STEP;
        let down = objective(game, &probe, n)?;
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * FD_STEP);
    }
    Ok(g)
}

fn gradient_ascent(game: &Game<'_>, start: Vec<f64>, n: usize) -> Result<(Vec<f64>, f64)> {
    let mut x = start;
    let mut f = objective(game, &x, n)?;
    let mut step = 0.1;
    for _ in 0..MAX_ITERATIONS {
        let g = gradient(game, &x, n)?;
        let mut accepted = None;
        while step > 1e-16 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let y = project_to_simplex(&trial);
            let fy = objective(game, &y, n)?;
            if fy > f {
                accepted = Some((y, fy));
                break;
            }
            step *= 0.5;
        }
        let Some((y, fy)) = accepted else { break };
        let moved = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let gain = fy - f;
        x = y;
        f = fy;
        step *= 2.0;
        if moved < 1e-13 || gain < 1e-15 * f.abs().max(1.0) {
            break;
        }
    }
    Ok((x, f))
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Best point of the simplex lattice with spacing `1 / resolution`.
/// Ties resolve to the lexicographically smallest share vector.
pub fn grid_search(game: &Game<'_>, n: usize, resolution: usize) -> Result<(Vec<f64>, f64)> {
    let m = game.model.num_satellites();
    if resolution == 0 {
        return Err(Error::config("optimal.grid_resolution", "must be > 0"));
    }
    let mut points = Vec::new();
    compositions(resolution, m, &mut Vec::with_capacity(m), &mut points);
    let scored: Vec<(usize, f64)> = points
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            let shares: Vec<f64> = p.iter().map(|&k| k as f64 / resolution as f64).collect();
            objective(game, &shares, n).map(|f| (idx, f))
        })
        .collect::<Result<_>>()?;
    // enumeration order is lexicographic, so the first maximum wins ties
    let (best, f) = scored.into_iter().fold((0, f64::NEG_INFINITY), |acc, (i, f)| if f > acc.1 { (i, f) } else { acc });
    Ok((points[best].iter().map(|&k| k as f64 / resolution as f64).collect(), f))
}

pub fn optimal_search(game: &Game<'_>, n_devices: usize, grid_resolution: usize) -> Result<OptimalSearch> {
    let m = game.model.num_satellites();
    if m == 0 {
        return Err(Error::config("satellites", "need at least one satellite"));
    }
    let uniform = vec![1.0 / m as f64; m];
    let (mut best, gradient_average) = gradient_ascent(game, uniform, n_devices)?;
    let mut average = gradient_average;
    let mut grid_average = None;
    if m <= GRID_MAX_SATELLITES && grid_resolution > 0 {
        let (grid_x, grid_f) = grid_search(game, n_devices, grid_resolution)?;
        grid_average = Some(grid_f);
        let (refined, refined_f) = gradient_ascent(game, grid_x, n_devices)?;
        if refined_f > average {
            best = refined;
            average = refined_f;
        }
    }
    Ok(OptimalSearch {
        state: PopulationState { shares: best, n_devices, round: 0 },
        average,
        gradient_average,
        grid_average,
    })
}

pub fn optimal_shares(game: &Game<'_>, n_devices: usize, grid_resolution: usize) -> Result<PopulationState> {
    Ok(optimal_search(game, n_devices, grid_resolution)?.state)
}

/// Integer counts summing to `n` closest to `shares * n`; leftover devices
/// go to the largest fractional parts, lowest index first on ties.
pub fn largest_remainder(shares: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = shares.iter().sum();
    let quotas: Vec<f64> = shares.iter().map(|x| x / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Greedy single-device moves while any move raises the average utility.
pub fn polish_counts(counts: &[usize], game: &Game<'_>) -> Result<Vec<usize>> {
    let m = counts.len();
    let n: usize = counts.iter().sum();
    let mut current = counts.to_vec();
    let mut f = game.average_utility(&PopulationState::from_counts(&current))?;
    for _ in 0..=(n * m) {
        let mut best: Option<(Vec<usize>, f64)> = None;
        for i in 0..m {
            if current[i] == 0 {
                continue;
            }
            for j in 0..m {
                if i == j {
                    continue;
                }
                let mut trial = current.clone();
                trial[i] -= 1;
                trial[j] += 1;
                let ft = game.average_utility(&PopulationState::from_counts(&trial))?;
                if ft > best.as_ref().map_or(f, |b| b.1) {
                    best = Some((trial, ft));
                }
            }
        }
        match best {
            Some((c, ft)) if ft - f > 1e-15 * f.abs().max(1.0) => {
                current = c;
                f = ft;
            }
            _ => break,
        }
    }
    Ok(current)
}
