//! Configuration, scenario construction, sweeps and output.

pub mod config;
pub mod emit;
pub mod experiment;
pub mod scenario;
pub mod seed;

pub use config::{
    load_config, DeviceConfig, EvolutionConfig, EvolutionPath, ExperimentConfig, OptimalConfig, RiskConfig,
};
pub use emit::{emit, emit_trace, format_g9, OutputFormat, CSV_HEADER};
pub use experiment::{
    draw_demands, normalize_utility, risk_metric, run_experiment, Experiment, ExperimentOutput, ExperimentRecord,
    OptimumCell, TraceRecord,
};
pub use scenario::Scenario;
