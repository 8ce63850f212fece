//! Experiment orchestration: baseline tuning, reference budgets, rate fits,
//! lower-bound experiments and the INI/CSV/JSON pipeline.

mod algos;
pub mod baseline;
pub mod budget;
pub mod config;
pub mod ini;
pub mod lowerbound;
pub mod plot;
pub mod records;
pub mod report;
pub mod runner;
pub mod stats;

pub use algos::{run_algo, AlgoOutput, AlgoSpec, OUTPUT_CANDIDATE};
pub use baseline::{sgd_grid, tune_sgd_baseline, BaselineResult, ErrorMetric};
pub use budget::{polylog_budget, short_horizon_fallback, BudgetSetting};
pub use config::ExperimentConfig;
pub use ini::parse_ini;
pub use lowerbound::{
    closed_form_confusion, conflict_threshold, lb_conflict_check, run_confusion_experiment, ConflictResult,
    ConfusionResult, IotaRule,
};
pub use records::{read_runs, write_runs, RunRecord, RUNS_HEADER};
pub use report::ReportSummary;
pub use runner::{check_records, execute_config, write_outputs, RunOutcome};
pub use stats::{fit_loglog_slope, median, SlopeFit};
