//! The SecureBoost training loop: local rounds, federated rounds with the
//! purity threshold, per-round cost and leakage measurement.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::he::{AdditiveHe, CountingScheme, HeContext, HeCostModel, HeCounters};
use super::log::{LeafAssignmentLog, LoggedLeaf, LoggedTree};
use super::paillier::Paillier;
use super::protocol::{node_purity, record, split_finding, EncryptedGradients, MessageScope, PartyView, SplitDecision};
use super::transcript::{MessageKind, Transcript};
use crate::attack::{attack_colocation, AttackerKnowledge, CoLocation};
use crate::boosting::{
    apply_tree, compute_gradients, quantile_binning, BinnedMatrix, BoostParams, DecisionTree, Forest, GradientPair,
    GrowContext, Node, Owner, TreeKind,
};
use crate::data::{Dataset, VerticalPartition};
use crate::error::{Error, Result};
use crate::rng::{derive, rng_from, tags};

/// Training hyperparameters searched by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    /// Federated boosting rounds.
    pub n_f: usize,
    /// Rounds trained by the active party alone before federation.
    pub n_l: usize,
    pub max_depth: usize,
    /// Instance subsample ratio per round.
    pub subsample: f64,
    /// Nodes at or above this purity are grown locally by the active party.
    /// `None` turns the purity defense off.
    pub purity_threshold: Option<f64>,
    pub learning_rate: f64,
    /// The first federated tree uses active-party features only.
    pub complete_secure: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            n_f: 5,
            n_l: 0,
            max_depth: 3,
            subsample: 0.8,
            purity_threshold: None,
            learning_rate: 0.3,
            complete_secure: true,
        }
    }
}

impl TrainingConfig {
    /// Trainer-side bounds. These are wider than the optimizer's search
    /// ranges so baselines (`n_f = 20`) and unit cases (`p = 0`) run.
    pub fn validate(&self) -> Result<()> {
        if self.n_f < 1 {
            return Err(Error::param("n_f", "must be at least 1"));
        }
        if self.n_l > 64 || self.n_f > 64 {
            return Err(Error::param("n_f/n_l", "at most 64 rounds each"));
        }
        if !(1..=8).contains(&self.max_depth) {
            return Err(Error::param("max_depth", format!("{} outside [1, 8]", self.max_depth)));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::param("subsample", format!("{} outside (0, 1]", self.subsample)));
        }
        if let Some(p) = self.purity_threshold {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param("purity_threshold", format!("{p} outside [0, 1]")));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::param(
                "learning_rate",
                format!("{} outside (0, 1]", self.learning_rate),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendKind {
    /// Plaintext stand-in that counts operations.
    #[default]
    Counting,
    Paillier {
        modulus_bits: u64,
    },
}

/// Everything besides the hyperparameters that one training run needs.
#[derive(Debug, Clone)]
pub struct SboSetup<'a> {
    pub partition: &'a VerticalPartition,
    /// Training positions of the balanced attack probe.
    pub probe: &'a [usize],
    pub knowledge: &'a AttackerKnowledge,
    pub cost_model: HeCostModel,
    pub params: BoostParams,
    pub backend: BackendKind,
    pub seed: u64,
    pub record_transcript: bool,
}

/// Measurements of one federated round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    /// 1-based federated round.
    pub round: usize,
    pub cost_seconds: f64,
    pub leakage: f64,
    pub counters: HeCounters,
    pub logged_leaves: usize,
    pub subsample_size: usize,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub forest: Forest,
    pub log: LeafAssignmentLog,
    pub counters: HeCounters,
    pub rounds: Vec<RoundMetrics>,
    /// Σ of per-round cost.
    pub epsilon_c: f64,
    /// Max of per-round leakage.
    pub epsilon_p: f64,
    pub transcript: Option<Transcript>,
}

fn subsample(n: usize, ratio: f64, seed: u64, stream: u64) -> Vec<usize> {
    let k = ((ratio * n as f64).floor() as usize).clamp(1, n);
    let mut rng = rng_from(seed, stream);
    let mut idx = sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Trains one model and measures per-round cost and leakage.
pub fn sbo_train(config: &TrainingConfig, setup: &SboSetup<'_>, train: &Dataset) -> Result<TrainingOutcome> {
    config.validate()?;
    setup.cost_model.validate()?;
    setup.partition.validate(train.cols())?;
    match setup.backend {
        BackendKind::Counting => {
            let key = derive(setup.seed, tags::HE);
            run(config, setup, train, HeContext::new(CountingScheme::new(key)))
        }
        BackendKind::Paillier { modulus_bits } => {
            let key = Paillier::generate(modulus_bits, derive(setup.seed, tags::HE))?;
            run(config, setup, train, HeContext::new(key))
        }
    }
}

struct Grower<'a, 'b, S: AdditiveHe> {
    he: &'b mut HeContext<S>,
    encrypted: &'b EncryptedGradients<S::Ciphertext>,
    gradients: &'a [GradientPair],
    active: PartyView<'a>,
    passive: Option<PartyView<'a>>,
    labels: &'a [usize],
    classes: usize,
    params: &'a BoostParams,
    config: &'a TrainingConfig,
    round: usize,
    class_slot: usize,
    transcript: Option<&'b mut Transcript>,
    leaves: Vec<LoggedLeaf>,
}

impl<S: AdditiveHe> Grower<'_, '_, S> {
    fn active_ctx(&self) -> GrowContext<'_> {
        GrowContext {
            binned: self.active.binned,
            edges: self.active.edges,
            columns: self.active.columns,
            gradients: self.gradients,
            params: self.params,
        }
    }

    fn scope(&self, node: usize) -> MessageScope {
        MessageScope {
            round: self.round,
            class_slot: self.class_slot,
            node: Some(node),
        }
    }

    fn log_leaf(&mut self, node: usize, instances: &[usize], visible: bool) {
        if visible {
            let mut instances = instances.to_vec();
            instances.sort_unstable();
            self.leaves.push(LoggedLeaf { node, instances });
        }
    }

    /// Grows the federated node holding `instances`. `visible` is true once
    /// the path from the root contains a passive split.
    fn grow(&mut self, tree: &mut DecisionTree, instances: &[usize], depth: usize, visible: bool) -> Result<usize> {
        if depth >= self.config.max_depth {
            let id = tree.reserve();
            tree.nodes[id] = Node::Leaf {
                weight: self.active_ctx().leaf_weight(instances),
                owner: Owner::Active,
            };
            self.log_leaf(id, instances, visible);
            return Ok(id);
        }

        let local = match self.config.purity_threshold {
            Some(p) => node_purity(instances, self.labels, self.classes)? >= p,
            None => false,
        };
        if local {
            let ctx = GrowContext {
                binned: self.active.binned,
                edges: self.active.edges,
                columns: self.active.columns,
                gradients: self.gradients,
                params: self.params,
            };
            let id = tree.grow(&ctx, instances, depth, self.config.max_depth, Owner::Local);
            let scope = self.scope(id);
            record(
                &mut self.transcript,
                scope,
                MessageKind::LocalSubtree,
                instances.len(),
                HeCounters::default(),
            );
            self.log_leaf(id, instances, visible);
            return Ok(id);
        }

        let id = tree.reserve();
        let scope = self.scope(id);
        let decision = split_finding(
            self.he,
            instances,
            self.encrypted,
            self.gradients,
            &self.active,
            self.passive.as_ref(),
            self.params,
            scope,
            self.transcript.as_deref_mut(),
        )?;
        match decision {
            SplitDecision::Leaf => {
                tree.nodes[id] = Node::Leaf {
                    weight: self.active_ctx().leaf_weight(instances),
                    owner: Owner::Active,
                };
                self.log_leaf(id, instances, visible);
            }
            SplitDecision::Split {
                owner,
                candidate,
                left,
                right,
            } => {
                let child_visible = visible || owner == Owner::Passive;
                let l = self.grow(tree, &left, depth + 1, child_visible)?;
                let r = self.grow(tree, &right, depth + 1, child_visible)?;
                tree.nodes[id] = Node::Split {
                    feature: candidate.feature,
                    bin: candidate.bin,
                    threshold: self.active.edges.threshold(candidate.feature, candidate.bin),
                    left: l,
                    right: r,
                    owner,
                };
            }
        }
        Ok(id)
    }
}

fn run<S: AdditiveHe>(
    config: &TrainingConfig,
    setup: &SboSetup<'_>,
    train: &Dataset,
    mut he: HeContext<S>,
) -> Result<TrainingOutcome> {
    let n = train.rows();
    let classes = train.class_count();
    let labels = train.labels();
    let edges = quantile_binning(train, setup.params.bins)?;
    let binned = BinnedMatrix::new(train, &edges);
    let active = PartyView {
        binned: &binned,
        edges: &edges,
        columns: &setup.partition.active_columns,
    };
    let passive = PartyView {
        binned: &binned,
        edges: &edges,
        columns: &setup.partition.passive_columns,
    };

    let mut forest = Forest::new(config.learning_rate, classes, train.cols());
    let slots = forest.slots();
    let mut scores = vec![0.0; n * slots];

    // stage 1: active party alone
    for round in 0..config.n_l {
        let sub = subsample(
            n,
            config.subsample,
            setup.seed,
            tags::SUBSAMPLE ^ (1 << 32) ^ round as u64,
        );
        let grads = compute_gradients(labels, &scores, forest.loss, classes)?;
        for (slot, g) in grads.iter().enumerate() {
            let ctx = GrowContext {
                binned: &binned,
                edges: &edges,
                columns: active.columns,
                gradients: g,
                params: &setup.params,
            };
            let mut tree = DecisionTree::new(slot, TreeKind::Local);
            tree.grow(&ctx, &sub, 0, config.max_depth, Owner::Local);
            apply_tree(&mut scores, slots, train, &tree, config.learning_rate);
            forest.trees.push(tree);
        }
    }

    // stage 2: federated rounds
    let probe_labels: Vec<usize> = setup.probe.iter().map(|&i| labels[i]).collect();
    let mut co = CoLocation::new(setup.probe, n)?;
    let mut log = LeafAssignmentLog::new(n, classes);
    let mut transcript = setup.record_transcript.then(Transcript::default);
    let mut rounds = Vec::with_capacity(config.n_f);
    for round in 1..=config.n_f {
        let before = he.counters();
        let sub = subsample(n, config.subsample, setup.seed, tags::SUBSAMPLE ^ round as u64);
        let grads = compute_gradients(labels, &scores, forest.loss, classes)?;
        let passive_view = if config.complete_secure && round == 1 {
            None
        } else {
            Some(passive)
        };
        let mut round_leaves = 0;
        for (slot, g) in grads.iter().enumerate() {
            let enc_before = he.counters();
            let encrypted = EncryptedGradients::encrypt(&mut he, g, &sub)?;
            let scope = MessageScope {
                round,
                class_slot: slot,
                node: None,
            };
            let mut tr = transcript.as_mut();
            record(
                &mut tr,
                scope,
                MessageKind::EncryptedGradients,
                2 * sub.len(),
                he.counters().since(&enc_before),
            );

            let mut tree = DecisionTree::new(slot, TreeKind::Federated);
            let leaves = {
                let mut grower = Grower {
                    he: &mut he,
                    encrypted: &encrypted,
                    gradients: g,
                    active,
                    passive: passive_view,
                    labels,
                    classes,
                    params: &setup.params,
                    config,
                    round,
                    class_slot: slot,
                    transcript: tr,
                    leaves: Vec::new(),
                };
                grower.grow(&mut tree, &sub, 0, false)?;
                grower.leaves
            };
            round_leaves += leaves.len();
            let logged = LoggedTree {
                round,
                class_slot: slot,
                leaves,
            };
            co.add_tree(&logged);
            log.trees.push(logged);
            apply_tree(&mut scores, slots, train, &tree, config.learning_rate);
            forest.trees.push(tree);
        }
        let delta = he.counters().since(&before);
        let leakage = attack_colocation(&co, &probe_labels, classes, setup.knowledge)?.epsilon_p;
        rounds.push(RoundMetrics {
            round,
            cost_seconds: setup.cost_model.cost(&delta),
            leakage,
            counters: delta,
            logged_leaves: round_leaves,
            subsample_size: sub.len(),
        });
    }

    forest.bin_edges = Some(edges);
    let epsilon_c = rounds.iter().map(|r| r.cost_seconds).sum();
    let epsilon_p = rounds.iter().map(|r| r.leakage).fold(0.0, f64::max);
    Ok(TrainingOutcome {
        forest,
        log,
        counters: he.counters(),
        rounds,
        epsilon_c,
        epsilon_p,
        transcript,
    })
}
