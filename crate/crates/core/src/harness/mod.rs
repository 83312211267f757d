//! Experiment harness: configs, replicate runs, aggregation and output files.

mod analysis;
mod config;
mod output;
mod run;

pub use analysis::{analyze, AnalysisReport, BoundPoint};
pub use config::{
    Algorithm, AnalysisSection, DelaySpec, EnvironmentSection, ExperimentConfig, GammaSetting,
    PolicySection, RetrainSetting, SourceKind, StepsSetting, DATA_ENV,
};
pub use output::{emit, run_csv, MEAN_HEADER, RUN_HEADER};
pub use run::{
    aggregate, build_source, load_dataset, neural_config, run_experiment, run_loop, run_seed,
    Aggregate, RunResult, RunRow,
};
