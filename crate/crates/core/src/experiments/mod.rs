//! Named experiments over the projected-ensemble pipeline: TOML config,
//! seeded parallel trials, CSV records and JSON summaries.

mod config;
mod record;
mod runner;
mod summary;

pub use config::{
    BasisName, EnsembleConfig, ExperimentConfig, ExperimentKind, GridConfig, GridPoint,
    SpectrumName, Thresholds, TimeScan, TimeSpec, MAX_DENSE_DIM,
};
pub use record::{format_g17, to_csv, ResultRecord, CSV_HEADER};
pub use runner::{
    config_hash, run_experiment, run_to_dir, trial_rng, trial_stream, write_outputs, RunOptions,
    RunOutput,
};
pub use summary::{
    build_summary, linear_fit, local_minima, loglog_slope, separation_ratios, summarize, Check,
    FailureEntry, PointSummary, Stat, Summary,
};
