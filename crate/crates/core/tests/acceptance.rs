//! Acceptance report: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sagin_core::game::agent::{counts, run_agent};
use sagin_core::game::{
    equilibrium_gap, euler_update, replicator_step, run_replicator, GameConfig, PopulationState, UtilityWeights,
};
use sagin_core::harness::{emit, Experiment, ExperimentConfig, ExperimentRecord, OutputFormat};
use sagin_core::queueing::QueueConfig;
use sagin_core::secrecy::monte_carlo::eavesdrop_capacity_mc;
use sagin_core::secrecy::total_eavesdrop_capacity;
use sagin_core::strategies::{assign, exhaustive_optimum, optimal_search, StrategyKind};
use sha2::{Digest, Sha256};

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

const SIZES: [usize; 10] = [100, 200, 300, 400, 500, 600, 700, 800, 900, 1000];

fn secrecy_oracle(r: &mut Report) {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let mut refined = cfg.quadrature;
    refined.num_intervals *= 2;
    let mut worst_mc: f64 = 0.0;
    let mut worst_refine: f64 = 0.0;
    for sat in 0..cfg.geometry.num_serving {
        let quad = total_eavesdrop_capacity(sat, &cfg.geometry, &cfg.channel, &cfg.quadrature).unwrap();
        let fine = total_eavesdrop_capacity(sat, &cfg.geometry, &cfg.channel, &refined).unwrap();
        let mc = eavesdrop_capacity_mc(sat, &cfg.geometry, &cfg.channel, 10_000_000, 0x5EC0 + sat as u64).unwrap();
        worst_mc = worst_mc.max((mc.mean - quad).abs() / quad);
        worst_refine = worst_refine.max((fine - quad).abs() / quad);
    }
    let secs = start.elapsed().as_secs_f64();
    r.check(
        "secrecy-integral oracle",
        worst_mc < 0.03 && worst_refine < 1e-3 && secs < 60.0,
        format!(
            "max MC rel diff {worst_mc:.4} (< 0.03), refinement change {worst_refine:.2e} (< 1e-3), {secs:.1}s (< 60s)"
        ),
    );
}

fn simplex_conservation(r: &mut Report) {
    let exp = Experiment::new(ExperimentConfig::default()).unwrap();
    let game = exp.game();
    let mut state = PopulationState::new(vec![0.4, 0.3, 0.2, 0.1], 1000).unwrap();
    let (mut worst_sum, mut worst_drift, mut min_share): (f64, f64, f64) = (0.0, 0.0, 1.0);
    for _ in 0..10_000 {
        let profile = game.profile(&state).unwrap();
        let raw = euler_update(&state, &profile, &game.config);
        worst_drift = worst_drift.max((raw.iter().sum::<f64>() - 1.0).abs());
        state = replicator_step(&state, &profile, &game.config);
        worst_sum = worst_sum.max((state.shares.iter().sum::<f64>() - 1.0).abs());
        min_share = min_share.min(state.shares.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    r.check(
        "simplex conservation",
        worst_sum <= 1e-12 && worst_drift < 1e-8 && min_share >= 0.0,
        format!("10^4 steps: max |sum-1| {worst_sum:.2e} (<= 1e-12), max drift {worst_drift:.2e} (< 1e-8), min share {min_share:.3e}"),
    );
}

fn two_satellite_delay_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.geometry.num_serving = 2;
    cfg.geometry.serving_phases_deg = vec![0.0, 180.0];
    cfg.devices.cap_weights = vec![0.5, 0.5];
    cfg.queue = QueueConfig { service_rates: vec![20.0, 10.0], per_device_task_rate: 0.015, ..QueueConfig::default() };
    cfg.weights = UtilityWeights { alpha: 0.0, beta: 1.0 };
    cfg.game =
        GameConfig { learning_rate: 5.0, max_rounds: 500_000, equilibrium_tolerance: 1e-9, ..GameConfig::default() };
    cfg
}

fn equilibrium(r: &mut Report) {
    // (a) symmetric scenario from random interior starts
    let exp = Experiment::new(ExperimentConfig::default()).unwrap();
    let game = exp.game();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst_a: f64 = 0.0;
    let mut worst_gap_rel: f64 = 0.0;
    let mut all_converged = true;
    let mut starts: Vec<Vec<f64>> =
        vec![vec![0.7, 0.1, 0.1, 0.1], vec![0.97, 0.01, 0.01, 0.01], vec![0.01, 0.49, 0.01, 0.49]];
    for _ in 0..20 {
        let raw: Vec<f64> = (0..4).map(|_| 0.01 + rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        starts.push(raw.iter().map(|x| x / total).collect());
    }
    for shares in &starts {
        let start = PopulationState::new(shares.clone(), 1000).unwrap();
        let traj = run_replicator(&start, &game).unwrap();
        all_converged &= traj.converged;
        let last = traj.last();
        for x in &last.state.shares {
            worst_a = worst_a.max((x - 0.25).abs());
        }
        let gap = equilibrium_gap(&last.profile, &last.state, game.config.min_share_floor);
        worst_gap_rel = worst_gap_rel.max(gap / last.profile.average.abs().max(1.0));
    }
    r.check(
        "equilibrium (a) symmetric",
        worst_a <= 1e-3 && all_converged,
        format!(
            "{} interior starts at N=1000, max |x_i - 1/4| {worst_a:.2e} (<= 1e-3), all converged {all_converged}",
            starts.len()
        ),
    );

    // (b) two satellites, delay only: equal-delay split
    let cfg = two_satellite_delay_config();
    let exp2 = Experiment::new(cfg.clone()).unwrap();
    let game2 = exp2.game();
    let n = 1000usize;
    let traj = run_replicator(&PopulationState::uniform(2, n), &game2).unwrap();
    let last = traj.last();
    let load = n as f64 * cfg.queue.per_device_task_rate;
    let closed = (20.0 - 10.0 + load) / (2.0 * load);
    let err_b = (last.state.shares[0] - closed).abs();
    r.check(
        "equilibrium (b) two-satellite delay-only",
        err_b <= 1e-3,
        format!("x_1 = {:.6}, closed form {closed:.6}, |err| {err_b:.2e} (<= 1e-3)", last.state.shares[0]),
    );

    let gap = equilibrium_gap(&last.profile, &last.state, game2.config.min_share_floor);
    worst_gap_rel = worst_gap_rel.max(gap / last.profile.average.abs().max(1.0));
    r.check(
        "equilibrium (c) utility gap",
        worst_gap_rel <= 1e-3,
        format!("max_i |pi_i - avg| / max(1, |avg|) = {worst_gap_rel:.2e} (<= 1e-3)"),
    );
}

fn agent_mean_field(r: &mut Report) {
    let start_t = Instant::now();
    let exp = Experiment::new(ExperimentConfig::default()).unwrap();
    let game = exp.game();
    let n = 1000;
    let mut mean = [0.0f64; 4];
    let mut ode_start = None;
    for rep in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA6E7 + rep);
        let devices = exp.scenario.place_devices(n, &mut rng);
        let start = assign(StrategyKind::Nearest, 0, &devices, &exp.scenario.positions, &mut rng).unwrap();
        ode_start.get_or_insert_with(|| counts(&start, 4));
        let run = run_agent(start, &game, 10_000, &mut rng).unwrap();
        for (m, x) in mean.iter_mut().zip(&run.final_state().shares) {
            *m += x / 10.0;
        }
    }
    let ode = run_replicator(&PopulationState::from_counts(&ode_start.unwrap()), &game).unwrap();
    let target = &ode.last().state.shares;
    let worst = mean.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let secs = start_t.elapsed().as_secs_f64();
    r.check(
        "agent/mean-field equivalence",
        worst <= 0.05 && ode.converged && secs < 120.0,
        format!("N=1000, 10 reps: agent mean {mean:.4?} vs ODE {target:.4?}, max diff {worst:.2e} (<= 0.05), {secs:.1}s (< 120s)"),
    );
}

type Table = BTreeMap<(StrategyKind, usize), Vec<ExperimentRecord>>;

fn mean_of(t: &Table, s: StrategyKind, n: usize, f: impl Fn(&ExperimentRecord) -> f64) -> f64 {
    let rows = &t[&(s, n)];
    rows.iter().map(f).sum::<f64>() / rows.len() as f64
}

fn figure_trends(r: &mut Report) {
    let records = Experiment::new(ExperimentConfig::default()).unwrap().run(false).unwrap().records;
    let mut t: Table = BTreeMap::new();
    for rec in records {
        t.entry((rec.strategy, rec.n_devices)).or_default().push(rec);
    }
    use StrategyKind::*;

    // utility
    let nu = |s, n| mean_of(&t, s, n, |r| r.normalized_utility);
    let mut dominance = true;
    let mut worst_ratio: f64 = f64::INFINITY;
    for n in SIZES {
        let e = nu(Evolutionary, n);
        worst_ratio = worst_ratio.min(e);
        for s in [Random, Nearest, Fixed] {
            dominance &= e >= nu(s, n);
        }
    }
    let mut inversion_ok = true;
    let mut inv_detail = Vec::new();
    for s in [Optimal, Evolutionary, Random, Nearest, Fixed] {
        // utility must not decrease as N decreases: with N ascending, values non-increasing
        let u: Vec<f64> = SIZES.iter().map(|&n| mean_of(&t, s, n, |r| r.avg_utility)).collect();
        let inv = u.windows(2).filter(|w| w[1] > w[0] + 1e-12 * w[0].abs().max(1.0)).count();
        inversion_ok &= inv <= if s == Random { 1 } else { 0 };
        inv_detail.push(format!("{s}:{inv}"));
    }
    r.check(
        "utility vs population trend",
        dominance && worst_ratio >= 0.95 && inversion_ok,
        format!(
            "evolutionary >= random/nearest/fixed at every N: {dominance}; min normalized {worst_ratio:.4} (>= 0.95); inversions [{}]",
            inv_detail.join(" ")
        ),
    );

    // risk
    let risk = |s| mean_of(&t, s, 1000, |r| r.mean_risk_probability);
    let e = risk(Evolutionary);
    let ok = [Nearest, Fixed, Random].iter().all(|&s| e < risk(s));
    r.check(
        "risk comparison at N=1000",
        ok,
        format!(
            "N=1000 mean risk: evolutionary {e:.4}, random {:.4}, nearest {:.4}, fixed {:.4}",
            risk(Random),
            risk(Nearest),
            risk(Fixed)
        ),
    );

    // delay
    let delay = |s, n| mean_of(&t, s, n, |r| r.mean_queuing_delay);
    let worst_rel = SIZES
        .iter()
        .map(|&n| (delay(Evolutionary, n) - delay(Optimal, n)).abs() / delay(Optimal, n))
        .fold(0.0, f64::max);
    let below = delay(Evolutionary, 1000) < delay(Fixed, 1000) && delay(Evolutionary, 1000) < delay(Nearest, 1000);
    let mut monotone = true;
    for s in [Optimal, Nearest, Fixed] {
        let d: Vec<f64> = SIZES.iter().map(|&n| delay(s, n)).collect();
        // ascending N: delay must not fall
        let inv = d.windows(2).filter(|w| w[1] < w[0] - 1e-12).count();
        monotone &= inv == 0;
    }
    r.check(
        "queuing delay trend",
        worst_rel <= 0.10 && below && monotone,
        format!(
            "max |evo-opt|/opt {worst_rel:.2e} (<= 0.10); N=1000 evo {:.4} < fixed {:.4}, nearest {:.4}: {below}; deterministic arms monotone: {monotone}",
            delay(Evolutionary, 1000),
            delay(Fixed, 1000),
            delay(Nearest, 1000)
        ),
    );
}

fn tiny_config(m: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.geometry.num_serving = m;
    cfg.geometry.serving_phases_deg = (0..m).map(|i| i as f64 * 360.0 / m as f64).collect();
    cfg.devices.cap_weights = vec![1.0; m];
    // slower servers so a dozen devices see real congestion
    cfg.queue.service_rates = vec![0.5];
    cfg.queue.per_device_task_rate = 0.03;
    cfg.population_sizes = vec![12];
    cfg
}

fn tiny_oracle(r: &mut Report) {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_evo = f64::NEG_INFINITY;
    let mut cases = 0;
    for m in 1..=3 {
        let exp = Experiment::new(tiny_config(m)).unwrap();
        let game = exp.game();
        for n in 1..=12 {
            let best = exhaustive_optimum(&game, n).unwrap();
            let relaxed = optimal_search(&game, n, 100).unwrap();
            let profile = game.profile(&PopulationState::from_counts(&best.counts)).unwrap();
            let occupied: Vec<f64> =
                profile.per_satellite.iter().zip(&best.counts).filter(|(_, c)| **c > 0).map(|(p, _)| *p).collect();
            let spread = occupied.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - occupied.iter().cloned().fold(f64::INFINITY, f64::min);
            let bound = spread / n as f64;
            worst_excess = worst_excess.max(best.average - relaxed.average - bound);

            let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 7 + m as u64);
            let run = run_agent(vec![0; n], &game, 10_000, &mut rng).unwrap();
            let evo = run.final_profile().average;
            worst_evo = worst_evo.max(evo - best.average);
            cases += 1;
        }
    }
    r.check(
        "tiny-N exact oracle",
        worst_excess <= 1e-9 && worst_evo <= 1e-9,
        format!(
            "{cases} cases (N<=12, M<=3): max (integer - relaxed - bound) {worst_excess:.3e} (<= 0); max (evolutionary - integer) {worst_evo:.3e} (<= 1e-9)"
        ),
    );
}

fn csv_hash(cfg: &ExperimentConfig, threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let out = pool.install(|| Experiment::new(cfg.clone()).unwrap().run(false).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    emit(&out.records, &path, OutputFormat::Csv).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn determinism(r: &mut Report) {
    let cfg = ExperimentConfig::default();
    let a = csv_hash(&cfg, 1);
    let b = csv_hash(&cfg, 4);
    let c = csv_hash(&cfg, 4);
    r.check(
        "determinism",
        a == b && b == c,
        format!("sha256 of three runs (1, 4, 4 threads): {} {} {}", &a[..16], &b[..16], &c[..16]),
    );
}

fn main() {
    let mut r = Report { failures: 0 };
    secrecy_oracle(&mut r);
    simplex_conservation(&mut r);
    equilibrium(&mut r);
    agent_mean_field(&mut r);
    figure_trends(&mut r);
    tiny_oracle(&mut r);
    determinism(&mut r);
    println!("acceptance: {} failure(s)", r.failures);
    if r.failures > 0 {
        std::process::exit(1);
    }
}
