//! File formats, synthetic data and experiment drivers behind the `hgntr`
//! binary.

pub mod app;
pub mod config;
pub mod experiment;
pub mod format;
pub mod synth;

pub use app::{load_cores, main_entry, run, save_cores, Cli, Command};
pub use config::RunConfig;
pub use experiment::{bench, cluster, decompose, BenchRow, BenchSpec, ExperimentRecord, MetricStats, Repetition};
