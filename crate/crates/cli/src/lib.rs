//! Batch experiment runner: configuration, CSV traces and step-size sweeps.

pub mod config;
pub mod experiment;

pub use config::{ConfigError, ExperimentConfig, GameSource, Settings, Timing};
pub use experiment::{
    learner_config, load_game, run_experiment, run_single, sweep, sweep_path, RunError, RunSummary, SweepEntry, SweepReport, CSV_HEADER,
};
