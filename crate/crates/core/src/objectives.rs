//! Utility loss, training cost and privacy leakage, and the cached evaluator
//! that turns a hyperparameter configuration into an objective vector.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::attack::AttackerKnowledge;
use crate::boosting::{BoostParams, Forest, LossKind};
use crate::data::{sample_balanced, Dataset, VerticalPartition};
use crate::error::{Error, Result};
use crate::fedproto::{sbo_train, BackendKind, HeCostModel, HeCounters, SboSetup, TrainingConfig, TrainingOutcome};
use crate::rng::{derive, fnv1a, tags};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Auc,
    Accuracy,
}

impl MetricKind {
    pub fn for_classes(classes: usize) -> Self {
        if classes == 2 {
            MetricKind::Auc
        } else {
            MetricKind::Accuracy
        }
    }
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half. Computed from midranks.
pub fn auc(scores: &[f64], labels: &[usize]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Metric("scores and labels differ in length".into()));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Metric("AUC needs both classes present".into()));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::Metric("AUC needs binary labels".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mid = (i + j + 2) as f64 / 2.0;
        rank_sum += mid * order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

pub fn accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::Metric("accuracy needs equal, non-empty label lists".into()));
    }
    let wrong = predicted.iter().zip(truth).filter(|(a, b)| a != b).count();
    Ok(1.0 - wrong as f64 / truth.len() as f64)
}

/// `U(M, D)`: AUC for binary models, accuracy otherwise, on joint features.
pub fn utility(forest: &Forest, test: &Dataset) -> Result<f64> {
    if test.rows() == 0 {
        return Err(Error::Metric("empty test set".into()));
    }
    match MetricKind::for_classes(forest.class_count) {
        MetricKind::Auc if forest.loss == LossKind::Logistic => auc(&forest.predict(test)?, test.labels()),
        _ => accuracy(&forest.predict_class(test)?, test.labels()),
    }
}

/// `1 − U(M, D)`.
pub fn utility_loss(forest: &Forest, test: &Dataset) -> Result<f64> {
    utility(forest, test).map(|u| 1.0 - u)
}

/// Seconds spent on HE operations.
pub fn training_cost(counters: &HeCounters, model: &HeCostModel) -> f64 {
    model.cost(counters)
}

/// (ε_u, ε_c, ε_p), all minimised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub utility_loss: f64,
    pub cost: f64,
    pub leakage: f64,
}

impl ObjectiveVector {
    pub fn new(utility_loss: f64, cost: f64, leakage: f64) -> Self {
        Self {
            utility_loss,
            cost,
            leakage,
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.utility_loss, self.cost, self.leakage]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn is_valid(&self) -> bool {
        self.utility_loss.is_finite()
            && self.cost.is_finite()
            && self.leakage.is_finite()
            && (0.0..=1.0).contains(&self.utility_loss)
            && (0.0..=1.0).contains(&self.leakage)
            && self.cost >= 0.0
    }
}

/// Fixed data and settings shared by every evaluation of a campaign.
#[derive(Debug, Clone)]
pub struct ExperimentContext {
    pub train: Dataset,
    pub test: Dataset,
    pub partition: VerticalPartition,
    pub probe: Vec<usize>,
    pub knowledge: AttackerKnowledge,
    pub cost_model: HeCostModel,
    pub params: BoostParams,
    pub backend: BackendKind,
    pub seed: u64,
    /// Cost axis of the reference point; also the infeasible cost value.
    pub cost_ceiling: f64,
}

impl ExperimentContext {
    /// Draws the balanced probe (capped by the smallest class) and the
    /// attacker's known labels from `train`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        train: Dataset,
        test: Dataset,
        partition: VerticalPartition,
        probe_per_class: usize,
        known_per_class: usize,
        cost_model: HeCostModel,
        params: BoostParams,
        seed: u64,
        cost_ceiling: f64,
    ) -> Result<Self> {
        partition.validate(train.cols())?;
        let smallest = train.class_histogram().into_iter().min().unwrap_or(0);
        let per_class = probe_per_class.min(smallest);
        let probe = sample_balanced(train.labels(), per_class, derive(seed, tags::PROBE))?;
        let probe_labels: Vec<usize> = probe.iter().map(|&i| train.labels()[i]).collect();
        let knowledge = AttackerKnowledge::sample(&probe_labels, train.class_count(), known_per_class, seed)?;
        Ok(Self {
            train,
            test,
            partition,
            probe,
            knowledge,
            cost_model,
            params,
            backend: BackendKind::Counting,
            seed,
            cost_ceiling,
        })
    }

    pub fn setup(&self, seed: u64, record_transcript: bool) -> SboSetup<'_> {
        SboSetup {
            partition: &self.partition,
            probe: &self.probe,
            knowledge: &self.knowledge,
            cost_model: self.cost_model,
            params: self.params,
            backend: self.backend,
            seed,
            record_transcript,
        }
    }

    /// Seed of one configuration's training run.
    pub fn run_seed(&self, config: &TrainingConfig) -> u64 {
        derive(self.seed, config_hash(config))
    }

    /// Trains `config` and measures all three objectives.
    pub fn train(
        &self,
        config: &TrainingConfig,
        record_transcript: bool,
    ) -> Result<(TrainingOutcome, ObjectiveVector)> {
        let out = sbo_train(
            config,
            &self.setup(self.run_seed(config), record_transcript),
            &self.train,
        )?;
        let eu = utility_loss(&out.forest, &self.test)?;
        let obj = ObjectiveVector::new(eu, out.epsilon_c, out.epsilon_p);
        Ok((out, obj))
    }

    pub fn infeasible(&self) -> ObjectiveVector {
        ObjectiveVector::new(1.0, self.cost_ceiling, 1.0)
    }
}

/// Stable hash of a configuration's decoded values.
pub fn config_hash(c: &TrainingConfig) -> u64 {
    let mut bytes = Vec::with_capacity(48);
    for v in [c.n_f as u64, c.n_l as u64, c.max_depth as u64] {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for v in [
        c.subsample,
        c.purity_threshold.unwrap_or(f64::INFINITY),
        c.learning_rate,
    ] {
        bytes.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    bytes.push(u8::from(c.complete_secure));
    fnv1a(&bytes)
}

/// Cached, thread-safe evaluation. Failed trainings map to the infeasible
/// vector `(1, cost_ceiling, 1)`.
pub struct Evaluator {
    ctx: ExperimentContext,
    cache: Mutex<HashMap<u64, (TrainingConfig, ObjectiveVector)>>,
    trainings: AtomicUsize,
}

impl Evaluator {
    pub fn new(ctx: ExperimentContext) -> Self {
        Self {
            ctx,
            cache: Mutex::new(HashMap::new()),
            trainings: AtomicUsize::new(0),
        }
    }

    pub fn context(&self) -> &ExperimentContext {
        &self.ctx
    }

    /// Number of actual training runs (cache misses).
    pub fn trainings(&self) -> usize {
        self.trainings.load(Ordering::Relaxed)
    }

    pub fn evaluate(&self, config: &TrainingConfig) -> ObjectiveVector {
        let key = config_hash(config);
        if let Some((c, v)) = self.cache.lock().expect("cache poisoned").get(&key) {
            if c == config {
                return *v;
            }
        }
        self.trainings.fetch_add(1, Ordering::Relaxed);
        let v = match self.ctx.train(config, false) {
            Ok((_, v)) if v.is_valid() => v,
            Ok((_, v)) => {
                log::warn!("invalid objectives {v:?} for {config:?}");
                self.ctx.infeasible()
            }
            Err(e) => {
                log::warn!("training failed for {config:?}: {e}");
                self.ctx.infeasible()
            }
        };
        self.cache
            .lock()
            .expect("cache poisoned")
            .entry(key)
            .or_insert((*config, v));
        v
    }
}
