//! Experiment orchestration behind the `fedunlearn` binary: strict TOML
//! configuration, the end-to-end pipeline, result files, ablation sweeps and
//! golden-run regression.

mod config;
mod error;
mod golden;
mod output;
mod run;
mod sweep;

pub use config::{
    DatasetConfig, DatasetSource, ExperimentConfig, GoldenConfig, Method, ModelConfig, RuntimeClock,
};
pub use error::{ExpError, EXIT_CONFIG, EXIT_MISSING, EXIT_OK, EXIT_RUNTIME};
pub use golden::{
    check_orderings, golden_check, golden_record, GoldenFile, GoldenReport, OrderingOutcome,
};
pub use output::{read_results_json, results_csv, write_artifacts, ResultRow, RESULTS_HEADER};
pub use run::{run_experiment, simulate, ExperimentOutcome};
pub use sweep::{sweep, sweep_csv, SweepParam, SweepRow};
