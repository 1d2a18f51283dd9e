//! Monte Carlo experiment harness: config, execution, aggregation, output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{load_config, load_config_with_overrides, ExperimentConfig, ImpairmentSettings, Method, OutputFormat, SweepAxis};
pub use output::{emit, read_summary_csv, OutputPaths, SUMMARY_HEADER};
pub use run::{aggregate, cell_seed, run_experiment, RecordStatus, SummaryRow, TrialRecord};

use crate::error::Result;

/// Runs the experiment, writes all outputs and returns the summary.
pub fn run_and_emit(cfg: &ExperimentConfig) -> Result<(Vec<SummaryRow>, OutputPaths)> {
    let records = run_experiment(cfg)?;
    let summary = if records.is_empty() {
        Vec::new()
    } else {
        aggregate(cfg.sweep_axis, &records)?
    };
    let paths = emit(&summary, &records, cfg)?;
    Ok((summary, paths))
}
