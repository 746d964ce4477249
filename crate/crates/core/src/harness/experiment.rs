//! Strategy x population-size x replication sweep.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EvolutionPath, ExperimentConfig, RiskConfig};
use super::scenario::Scenario;
use super::seed::{derive_rng, stream};
use crate::error::Result;
use crate::game::agent::{counts, run_agent};
use crate::game::{run_replicator, Game, PopulationState};
use crate::geometry::Vec3;
use crate::secrecy::{shortfall_risk, SecrecyReport};
use crate::strategies::{assign, largest_remainder, optimal_search, polish_counts, StrategyKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub strategy: StrategyKind,
    pub n_devices: usize,
    pub replication: usize,
    pub round: u64,
    pub avg_utility: f64,
    pub normalized_utility: f64,
    pub mean_risk_probability: f64,
    pub mean_queuing_delay: f64,
    pub converged: bool,
    pub shares: Vec<f64>,
}

/// One point of a strategy's trajectory, emitted with `--trace`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub strategy: StrategyKind,
    pub n_devices: usize,
    pub replication: usize,
    pub round: u64,
    pub avg_utility: f64,
    pub shares: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub traces: Vec<TraceRecord>,
}

/// `u / u_opt` for a positive optimum; `u_opt / u` when the optimum is not
/// positive, so worse allocations still score below 1.
pub fn normalize_utility(u: f64, u_opt: f64) -> f64 {
    if u_opt > 0.0 {
        (u / u_opt).max(0.0)
    } else if u >= u_opt {
        1.0
    } else {
        u_opt / u
    }
}

pub fn draw_demands<R: Rng + ?Sized>(n: usize, risk: &RiskConfig, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| risk.demand_min + (risk.demand_max - risk.demand_min) * rng.random::<f64>()).collect()
}

/// Mean shortfall risk over devices. Each device receives an equal slice of
/// its satellite's secrecy capacity.
pub fn risk_metric(assignments: &[usize], reports: &[SecrecyReport], demands: &[f64], risk_exponent: f64) -> f64 {
    if assignments.is_empty() {
        return 0.0;
    }
    let load = counts(assignments, reports.len());
    let total: f64 = assignments
        .iter()
        .zip(demands)
        .map(|(&sat, &demand)| {
            let provided = reports[sat].secrecy_capacity / load[sat] as f64;
            shortfall_risk(demand, provided, risk_exponent)
        })
        .sum();
    total / assignments.len() as f64
}

/// Devices in order, filled satellite by satellite.
fn expand_counts(c: &[usize]) -> Vec<usize> {
    c.iter().enumerate().flat_map(|(sat, &k)| std::iter::repeat_n(sat, k)).collect()
}

/// Best integer allocation at one population size.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumCell {
    pub counts: Vec<usize>,
    pub average: f64,
}

/// A built scenario plus the config that produced it.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub scenario: Scenario,
}

struct Outcome {
    assignments: Vec<usize>,
    round: u64,
    converged: bool,
    trace: Vec<(u64, f64, Vec<f64>)>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let scenario = Scenario::build(&config)?;
        Ok(Self { config, scenario })
    }

    pub fn game(&self) -> Game<'_> {
        Game::new(&self.scenario, self.config.weights, self.config.game.clone())
    }

    pub fn optimum(&self, n: usize) -> Result<OptimumCell> {
        let game = self.game();
        let search = optimal_search(&game, n, self.config.optimal.grid_resolution)?;
        let c = polish_counts(&largest_remainder(&search.state.shares, n), &game)?;
        let average = game.average_utility(&PopulationState::from_counts(&c))?;
        Ok(OptimumCell { counts: c, average })
    }

    fn devices(&self, n: usize, rep: usize) -> Vec<Vec3> {
        let mut rng = derive_rng(self.config.master_seed, &[stream::DEVICE_POSITIONS, n as u64, rep as u64]);
        self.scenario.place_devices(n, &mut rng)
    }

    fn strategy_rng(&self, kind: StrategyKind, n: usize, rep: usize) -> ChaCha8Rng {
        derive_rng(self.config.master_seed, &[stream::STRATEGY, kind as u64, n as u64, rep as u64])
    }

    fn play(&self, kind: StrategyKind, n: usize, rep: usize, optimum: &OptimumCell) -> Result<Outcome> {
        let m = self.scenario.positions.len();
        let mut rng = self.strategy_rng(kind, n, rep);
        let game = self.game();
        let fixed = |assignments| Outcome { assignments, round: 0, converged: true, trace: Vec::new() };
        match kind {
            StrategyKind::Optimal => Ok(fixed(expand_counts(&optimum.counts))),
            StrategyKind::Random | StrategyKind::Nearest | StrategyKind::Fixed => {
                let devices = self.devices(n, rep);
                Ok(fixed(assign(kind, self.config.fixed_target, &devices, &self.scenario.positions, &mut rng)?))
            }
            StrategyKind::Evolutionary => {
                let devices = self.devices(n, rep);
                let start = assign(StrategyKind::Nearest, 0, &devices, &self.scenario.positions, &mut rng)?;
                match self.config.evolution.path {
                    EvolutionPath::Agent => {
                        let max_rounds = self.config.evolution.max_agent_rounds;
                        let run = run_agent(start, &game, max_rounds, &mut rng)?;
                        let trace = run
                            .points
                            .iter()
                            .map(|p| (p.state.round, p.profile.average, p.state.shares.clone()))
                            .collect();
                        Ok(Outcome {
                            converged: run.converged || run.rounds < max_rounds,
                            round: run.rounds,
                            assignments: run.assignments,
                            trace,
                        })
                    }
                    EvolutionPath::MeanField => {
                        let initial = PopulationState::from_counts(&counts(&start, m));
                        let traj = run_replicator(&initial, &game)?;
                        let last = traj.last();
                        let trace = traj
                            .points
                            .iter()
                            .map(|p| (p.state.round, p.profile.average, p.state.shares.clone()))
                            .collect();
                        Ok(Outcome {
                            assignments: expand_counts(&largest_remainder(&last.state.shares, n)),
                            round: last.state.round,
                            converged: traj.converged,
                            trace,
                        })
                    }
                }
            }
        }
    }

    /// Runs one (strategy, N, replication) cell and measures its final allocation.
    pub fn run_cell(
        &self,
        kind: StrategyKind,
        n: usize,
        rep: usize,
        optimum: &OptimumCell,
    ) -> Result<(ExperimentRecord, Vec<TraceRecord>)> {
        let m = self.scenario.positions.len();
        let outcome = self.play(kind, n, rep, optimum)?;
        let state = PopulationState::from_counts(&counts(&outcome.assignments, m));
        let avg_utility = self.game().average_utility(&state)?;
        let delays = self.scenario.delays(&state);
        let mean_queuing_delay = state.shares.iter().zip(&delays).map(|(x, d)| x * d).sum();

        let mut demand_rng = derive_rng(self.config.master_seed, &[stream::SECRECY_DEMANDS, n as u64, rep as u64]);
        let demands = draw_demands(n, &self.config.risk, &mut demand_rng);
        let mean_risk_probability =
            risk_metric(&outcome.assignments, &self.scenario.reports, &demands, self.config.risk.risk_exponent);

        let traces = outcome
            .trace
            .into_iter()
            .map(|(round, avg_utility, shares)| TraceRecord {
                strategy: kind,
                n_devices: n,
                replication: rep,
                round,
                avg_utility,
                shares,
            })
            .collect();
        let record = ExperimentRecord {
            strategy: kind,
            n_devices: n,
            replication: rep,
            round: outcome.round,
            avg_utility,
            normalized_utility: normalize_utility(avg_utility, optimum.average),
            mean_risk_probability,
            mean_queuing_delay,
            converged: outcome.converged,
            shares: state.shares,
        };
        Ok((record, traces))
    }

    /// Full sweep. Cells run in parallel on the current rayon pool; the
    /// merged output is sorted, so it does not depend on scheduling.
    pub fn run(&self, trace: bool) -> Result<ExperimentOutput> {
        let cfg = &self.config;
        let optima: Vec<OptimumCell> =
            cfg.population_sizes.par_iter().map(|&n| self.optimum(n)).collect::<Result<_>>()?;

        let mut cells = Vec::new();
        for (ni, &n) in cfg.population_sizes.iter().enumerate() {
            for rep in 0..cfg.replications {
                for &kind in &cfg.strategies {
                    cells.push((kind, n, rep, ni));
                }
            }
        }
        let results: Vec<(ExperimentRecord, Vec<TraceRecord>)> = cells
            .par_iter()
            .map(|&(kind, n, rep, ni)| self.run_cell(kind, n, rep, &optima[ni]))
            .collect::<Result<_>>()?;

        let mut out = ExperimentOutput::default();
        for (record, traces) in results {
            out.records.push(record);
            if trace {
                out.traces.extend(traces);
            }
        }
        let key = |s: StrategyKind, n: usize, r: usize| (s.name(), n, r);
        out.records.sort_by(|a, b| {
            key(a.strategy, a.n_devices, a.replication).cmp(&key(b.strategy, b.n_devices, b.replication))
        });
        out.traces.sort_by(|a, b| {
            key(a.strategy, a.n_devices, a.replication)
                .cmp(&key(b.strategy, b.n_devices, b.replication))
                .then(a.round.cmp(&b.round))
        });
        Ok(out)
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    Ok(Experiment::new(config.clone())?.run(false)?.records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secrecy::SecrecyReport;

    fn report(c: f64) -> SecrecyReport {
        SecrecyReport {
            satellite_id: 0,
            legit_snr: 0.0,
            eavesdrop_capacity: 0.0,
            secrecy_capacity: c,
            threat_probability: 0.0,
            half_angle_rad: 0.0,
        }
    }

    #[test]
    fn normalization_branches() {
        assert_eq!(normalize_utility(2.0, 4.0), 0.5);
        assert_eq!(normalize_utility(-1.0, 4.0), 0.0);
        assert_eq!(normalize_utility(-0.4, -0.2), 0.5);
        assert_eq!(normalize_utility(-0.2, -0.2), 1.0);
    }

    #[test]
    fn risk_metric_examples() {
        let reports = [report(100.0), report(100.0)];
        assert_eq!(risk_metric(&[0, 1], &reports, &[0.0, 0.0], 1.0), 0.0);
        // each device gets 50; shortfall of ln2 / kappa gives 1/2
        let kappa = 0.01;
        let d = 50.0 + std::f64::consts::LN_2 / kappa;
        let r = risk_metric(&[0, 0, 1, 1], &reports, &[d; 4], kappa);
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn demands_within_range() {
        let risk = RiskConfig::default();
        let mut rng = derive_rng(1, &[2]);
        let d = draw_demands(10_000, &risk, &mut rng);
        assert!(d.iter().all(|x| (risk.demand_min..=risk.demand_max).contains(x)));
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        assert!((mean - 40_000.0).abs() < 300.0);
    }

    #[test]
    fn expand_counts_in_order() {
        assert_eq!(expand_counts(&[2, 0, 1]), vec![0, 0, 2]);
    }
}
