//! Reproducible Monte Carlo experiments: data generation, parallel trials,
//! power curves and their CSV files.

pub mod config;
pub mod csvio;
pub mod harness;
pub mod report;

pub use config::{log_checkpoints, ExperimentConfig, Scenario};
pub use csvio::{read_power, read_stopping, write_power, write_stopping, StoppingRow};
pub use harness::{
    child_seed, run_experiment, trial_rng, CurvePoint, DataStream, PowerCurve, TrialError, TrialPlan,
    TrialRecord,
};
pub use report::{render, stopping_path, summarize, ReportRow};
