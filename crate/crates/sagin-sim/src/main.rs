use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sagin_core::game::Game;
use sagin_core::harness::{emit, emit_trace, format_g9, load_config, Experiment, ExperimentConfig, OutputFormat};
use sagin_core::queueing::QueueConfig;
use sagin_core::secrecy::monte_carlo::eavesdrop_capacity_mc;
use sagin_core::secrecy::total_eavesdrop_capacity;
use sagin_core::strategies::{exhaustive_optimum, optimal_search, StrategyKind};
use sagin_core::Error;

#[derive(Parser)]
#[command(name = "sagin-sim", version, about = "Secure satellite access selection simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Full sweep over strategies, population sizes and replications.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write every round to `<out>.trace.jsonl`.
        #[arg(long)]
        trace: bool,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        parallel: usize,
    },
    /// One strategy at one population size; prints a summary.
    Single {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        devices: usize,
        #[arg(long, default_value_t = 0)]
        replication: usize,
    },
    /// Compares the quadrature eavesdropping capacity against Monte Carlo.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
    },
    /// Brute-force optimum for a tiny symmetric instance.
    Oracle {
        #[arg(long)]
        devices: usize,
        #[arg(long)]
        sats: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn config_or_default(path: Option<&Path>) -> Result<ExperimentConfig, Error> {
    match path {
        Some(p) => load_config(p),
        None => {
            let mut cfg = ExperimentConfig::default();
            cfg.apply_seed_override(std::env::var(sagin_core::harness::config::SEED_ENV).ok().as_deref())?;
            Ok(cfg)
        }
    }
}

fn trace_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".trace.jsonl");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, out, format, trace, parallel } => {
            let cfg = load_config(&config)?;
            let out = out.unwrap_or_else(|| cfg.output_path.clone());
            let experiment = Experiment::new(cfg)?;
            let pool = rayon_pool(parallel)?;
            let output = pool.install(|| experiment.run(trace))?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Jsonl => OutputFormat::Jsonl,
            };
            emit(&output.records, &out, format)?;
            if trace {
                emit_trace(&output.traces, &trace_path(&out))?;
            }
            eprintln!("wrote {} records to {}", output.records.len(), out.display());
        }
        Command::Single { config, strategy, devices, replication } => {
            let kind: StrategyKind = strategy.parse()?;
            let mut cfg = config_or_default(config.as_deref())?;
            cfg.population_sizes = vec![devices];
            let experiment = Experiment::new(cfg)?;
            let optimum = experiment.optimum(devices)?;
            let (r, _) = experiment.run_cell(kind, devices, replication, &optimum)?;
            println!("strategy             {}", r.strategy);
            println!("n_devices            {}", r.n_devices);
            println!("replication          {}", r.replication);
            println!("rounds               {}", r.round);
            println!("converged            {}", r.converged);
            println!("avg_utility          {}", format_g9(r.avg_utility));
            println!("normalized_utility   {}", format_g9(r.normalized_utility));
            println!("mean_risk            {}", format_g9(r.mean_risk_probability));
            println!("mean_queuing_delay   {}", format_g9(r.mean_queuing_delay));
            let shares: Vec<String> = r.shares.iter().map(|x| format_g9(*x)).collect();
            println!("shares               {}", shares.join(" "));
        }
        Command::Validate { config, samples } => {
            let cfg = config_or_default(config.as_deref())?;
            cfg.validate()?;
            let mut refined = cfg.quadrature;
            refined.num_intervals *= 2;
            let mut worst: f64 = 0.0;
            for sat in 0..cfg.geometry.num_serving {
                let quad = total_eavesdrop_capacity(sat, &cfg.geometry, &cfg.channel, &cfg.quadrature)?;
                let fine = total_eavesdrop_capacity(sat, &cfg.geometry, &cfg.channel, &refined)?;
                let mc =
                    eavesdrop_capacity_mc(sat, &cfg.geometry, &cfg.channel, samples, cfg.master_seed ^ sat as u64)?;
                let rel = (mc.mean - quad).abs() / quad.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                println!(
                    "sat {sat}: quadrature {} refined {} monte_carlo {} (se {}) rel_diff {}",
                    format_g9(quad),
                    format_g9(fine),
                    format_g9(mc.mean),
                    format_g9(mc.std_error),
                    format_g9(rel)
                );
            }
            println!("max relative difference {}", format_g9(worst));
        }
        Command::Oracle { devices, sats, config } => {
            if devices == 0 || devices > 12 {
                return Err(Error::config("devices", "must lie in 1..=12"));
            }
            if sats == 0 || sats > 3 {
                return Err(Error::config("sats", "must lie in 1..=3"));
            }
            let mut cfg = config_or_default(config.as_deref())?;
            cfg.geometry.num_serving = sats;
            cfg.geometry.serving_phases_deg = (0..sats).map(|i| i as f64 * 360.0 / sats as f64).collect();
            cfg.devices.cap_weights = vec![1.0; sats];
            if cfg.queue.service_rates.len() != 1 {
                cfg.queue = QueueConfig { service_rates: cfg.queue.service_rates[..sats].to_vec(), ..cfg.queue };
            }
            cfg.population_sizes = vec![devices.max(sats)];
            cfg.fixed_target = 0;
            let experiment = Experiment::new(cfg)?;
            let game: Game<'_> = experiment.game();
            let best = exhaustive_optimum(&game, devices)?;
            let relaxed = optimal_search(&game, devices, experiment.config.optimal.grid_resolution)?;
            println!("assignments evaluated {}", best.evaluated);
            println!("integer optimum       {} counts {:?}", format_g9(best.average), best.counts);
            println!("relaxed optimum       {}", format_g9(relaxed.average));
        }
    }
    Ok(())
}

fn rayon_pool(threads: usize) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::config("parallel", e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
