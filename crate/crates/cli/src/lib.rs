//! Library surface of the experiment runner, used by the binary and by the
//! acceptance suite (which re-runs sweeps in-process to compare bytes).

pub mod config;
pub mod pipeline;
pub mod render;

pub use config::ExperimentConfig;
pub use pipeline::{run_instance, run_sweep, SweepSummary, SWEEP_CSV_COLUMNS};
