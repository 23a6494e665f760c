//! Experiment configuration and the commands behind the `cmosb` binary.

mod commands;
mod config;
mod plot;

pub use commands::{
    baseline_configs, cmd_attack, cmd_gen_data, cmd_optimize, cmd_train, evaluate_baselines, load_archive,
    load_baselines, Baseline, BaselineSet, DatasetMeta, OptimizeOutcome, TrainReport, ARCHIVE_FILE, ATTACK_REPORT_FILE,
    BASELINES, BASELINES_CSV_FILE, BASELINES_FILE, DATASET_FILE, DATASET_META_FILE, FOREST_FILE, FRONT_CSV_FILE,
    HV_TRACE_FILE, LEAF_LOG_FILE, REPORT_SCHEMA_VERSION, TRAIN_REPORT_FILE,
};
pub use config::{
    AttackSection, BoostSection, ConstraintSection, DataSource, DatasetSection, ExperimentConfig, GaSection,
    TrainingSection,
};
pub use plot::{cmd_plot, front_svg, hv_svg, FRONT_SVG_FILE, HV_SVG_FILE};
