use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig};
use crate::attack::{run_attack, AttackReport};
use crate::boosting::forest::check_schema_major;
use crate::boosting::Forest;
use crate::error::{Error, Result};
use crate::fedproto::{HeCounters, LeafAssignmentLog, RoundMetrics, TrainingConfig};
use crate::moo::{cmosb_run, write_solutions_csv, CmosbResult, Solution};
use crate::objectives::{Evaluator, ObjectiveVector};

pub const REPORT_SCHEMA_VERSION: &str = "1.0";

pub const DATASET_FILE: &str = "dataset.csv";
pub const DATASET_META_FILE: &str = "dataset.json";
pub const FOREST_FILE: &str = "forest.json";
pub const LEAF_LOG_FILE: &str = "leaf_log.json";
pub const TRAIN_REPORT_FILE: &str = "train_report.json";
pub const ATTACK_REPORT_FILE: &str = "attack_report.json";
pub const FRONT_CSV_FILE: &str = "front.csv";
pub const ARCHIVE_FILE: &str = "archive.json";
pub const HV_TRACE_FILE: &str = "hv_trace.csv";
pub const BASELINES_CSV_FILE: &str = "baselines.csv";
pub const BASELINES_FILE: &str = "baselines.json";

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn prepare(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Sidecar describing a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema_version: String,
    pub rows: usize,
    pub features: usize,
    pub active_features: usize,
    pub passive_features: usize,
    pub classes: usize,
    pub class_sep: f64,
    pub class_histogram: Vec<usize>,
    pub seed: u64,
    pub label_column: String,
}

/// Writes the synthetic dataset as CSV plus a JSON sidecar.
pub fn cmd_gen_data(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    if cfg.dataset.source != DataSource::Synthetic {
        return Err(Error::param("dataset.source", "gen-data needs a synthetic dataset"));
    }
    let ds = cfg.synthetic_spec().generate()?;
    prepare(dir)?;
    let csv = dir.join(DATASET_FILE);
    let meta = dir.join(DATASET_META_FILE);
    ds.write_csv(&csv)?;
    write_json(
        &meta,
        &DatasetMeta {
            schema_version: REPORT_SCHEMA_VERSION.into(),
            rows: ds.rows(),
            features: ds.cols(),
            active_features: cfg.dataset.active_features,
            passive_features: cfg.dataset.passive_features,
            classes: ds.class_count(),
            class_sep: cfg.dataset.class_sep,
            class_histogram: ds.class_histogram(),
            seed: cfg.seed,
            label_column: "label".into(),
        },
    )?;
    Ok(vec![csv, meta])
}

/// Report of one `train` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub schema_version: String,
    pub seed: u64,
    pub config: TrainingConfig,
    pub epsilon_u: f64,
    pub epsilon_c: f64,
    pub epsilon_p: f64,
    pub counters: HeCounters,
    pub rounds: Vec<RoundMetrics>,
    pub logged_leaves: usize,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// One training run with the `[training]` hyperparameters. Writes the
/// forest, the passive party's leaf log and the report.
pub fn cmd_train(cfg: &ExperimentConfig, dir: &Path) -> Result<TrainReport> {
    let ctx = cfg.context()?;
    let config = cfg.training.config();
    let (out, obj) = ctx.train(&config, false)?;
    prepare(dir)?;
    out.forest.save(&dir.join(FOREST_FILE))?;
    out.log.save(&dir.join(LEAF_LOG_FILE))?;
    let report = TrainReport {
        schema_version: REPORT_SCHEMA_VERSION.into(),
        seed: ctx.run_seed(&config),
        config,
        epsilon_u: obj.utility_loss,
        epsilon_c: obj.cost,
        epsilon_p: obj.leakage,
        counters: out.counters,
        rounds: out.rounds,
        logged_leaves: out.log.entry_count(),
        train_rows: ctx.train.rows(),
        test_rows: ctx.test.rows(),
    };
    write_json(&dir.join(TRAIN_REPORT_FILE), &report)?;
    Ok(report)
}

/// Re-runs the clustering attack on a saved leaf log, using the probe and
/// known labels the config derives.
pub fn cmd_attack(cfg: &ExperimentConfig, dir: &Path) -> Result<AttackReport> {
    let forest_path = dir.join(FOREST_FILE);
    let log_path = dir.join(LEAF_LOG_FILE);
    for p in [&forest_path, &log_path] {
        if !p.is_file() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{} not found; run `train` first", p.display()),
            )));
        }
    }
    let forest = Forest::load(&forest_path)?;
    let log = LeafAssignmentLog::load(&log_path)?;
    let ctx = cfg.context()?;
    if log.instance_count != ctx.train.rows() || log.class_count != ctx.train.class_count() {
        return Err(Error::Schema(
            "leaf log does not match the configured training set".into(),
        ));
    }
    if forest.class_count != log.class_count {
        return Err(Error::Schema("forest and leaf log disagree on the class count".into()));
    }
    let report = run_attack(&log, &ctx.probe, ctx.train.labels(), &ctx.knowledge)?;
    write_json(&dir.join(ATTACK_REPORT_FILE), &report)?;
    Ok(report)
}

/// A fixed reference configuration evaluated next to the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub name: String,
    pub config: TrainingConfig,
    pub objectives: ObjectiveVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSet {
    pub schema_version: String,
    pub baselines: Vec<Baseline>,
}

/// `(name, n_f, d, η, r)` of the reference configurations, without defenses.
pub const BASELINES: [(&str, usize, usize, f64, f64); 3] = [
    ("Fate", 5, 3, 0.3, 0.8),
    ("Empirical", 10, 5, 0.3, 0.8),
    ("VF2Boost", 20, 7, 0.1, 0.8),
];

pub fn baseline_configs() -> Vec<(String, TrainingConfig)> {
    BASELINES
        .iter()
        .map(|&(name, n_f, d, eta, r)| {
            (
                name.to_string(),
                TrainingConfig {
                    n_f,
                    n_l: 0,
                    max_depth: d,
                    subsample: r,
                    purity_threshold: None,
                    learning_rate: eta,
                    complete_secure: true,
                },
            )
        })
        .collect()
}

pub fn evaluate_baselines(evaluator: &Evaluator) -> Vec<Baseline> {
    baseline_configs()
        .into_iter()
        .map(|(name, config)| Baseline {
            objectives: evaluator.evaluate(&config),
            name,
            config,
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub result: CmosbResult,
    pub baselines: Vec<Baseline>,
}

/// Constrained search plus baselines. Writes the front, the archive, the
/// hypervolume trace and the baseline rows.
pub fn cmd_optimize(cfg: &ExperimentConfig, dir: &Path) -> Result<OptimizeOutcome> {
    let evaluator = Evaluator::new(cfg.context()?);
    let result = cmosb_run(
        &cfg.ga_config(),
        &cfg.constraints(),
        &evaluator,
        cfg.search_space(),
        None,
    )?;
    let baselines = evaluate_baselines(&evaluator);
    prepare(dir)?;
    result.write_front_csv(&dir.join(FRONT_CSV_FILE))?;
    result.write_archive_json(&dir.join(ARCHIVE_FILE))?;
    result.write_hv_csv(&dir.join(HV_TRACE_FILE))?;
    let rows: Vec<Solution> = baselines
        .iter()
        .map(|b| Solution {
            generation: 0,
            config: b.config,
            objectives: b.objectives,
        })
        .collect();
    write_solutions_csv(&rows, &dir.join(BASELINES_CSV_FILE))?;
    write_json(
        &dir.join(BASELINES_FILE),
        &BaselineSet {
            schema_version: REPORT_SCHEMA_VERSION.into(),
            baselines: baselines.clone(),
        },
    )?;
    Ok(OptimizeOutcome { result, baselines })
}

/// Reads a campaign archive, rejecting unknown schema majors.
pub fn load_archive(path: &Path) -> Result<CmosbResult> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Schema(format!("{}: missing schema_version", path.display())))?;
    check_schema_major(version, crate::moo::FRONT_SCHEMA_VERSION)?;
    Ok(serde_json::from_value(value)?)
}

pub fn load_baselines(path: &Path) -> Result<Vec<Baseline>> {
    let set: BaselineSet = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    check_schema_major(&set.schema_version, REPORT_SCHEMA_VERSION)?;
    Ok(set.baselines)
}
