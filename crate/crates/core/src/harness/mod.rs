//! Experiment configuration, batch Monte Carlo execution, aggregation and
//! reporting.

pub mod report;
pub mod runner;
pub mod spec;

pub use report::{
    emit_report, emit_reports, summarize, ExperimentReport, OutputFormat, RunDetail, Tally,
    TrialRow,
};
pub use runner::{run_trials, run_trials_sequential, run_trials_with_exec};
pub use spec::{
    golden_fixture_inputs, golden_fixture_states, ExperimentSpec, InputPolicy, Scenario,
    ScenarioFamily, SpecBuilder,
};
