//! Plaintext histogram gradient boosting: the arithmetic shared by the
//! active party's local trees and the federated protocol.

pub mod binning;
pub mod forest;
pub mod histogram;
pub mod loss;
pub mod split;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use binning::{quantile_binning, quantile_edges, BinEdges, BinnedMatrix};
pub use forest::Forest;
pub use histogram::{build_histogram, BinStats, Histogram};
pub use loss::{compute_gradients, mean_loss, GradientPair, LossKind};
pub use split::{find_best_split, split_gain, SplitCandidate};
pub use tree::{train_local_tree, DecisionTree, GrowContext, Node, Owner, TreeKind};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Regularisation and binning shared by every tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Minimum gain for a split.
    pub gamma: f64,
    pub min_child_weight: f64,
    pub bins: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1e-3,
            bins: 32,
        }
    }
}

impl BoostParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", "must be non-negative"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", "must be non-negative"));
        }
        if !(self.min_child_weight >= 0.0 && self.min_child_weight.is_finite()) {
            return Err(Error::param("min_child_weight", "must be non-negative"));
        }
        if !(2..=256).contains(&self.bins) {
            return Err(Error::param("bins", "must lie in [2, 256]"));
        }
        Ok(())
    }
}

/// Adds `η · tree(row)` to every row's score in the tree's class slot.
pub fn apply_tree(scores: &mut [f64], slots: usize, data: &Dataset, tree: &DecisionTree, eta: f64) {
    for i in 0..data.rows() {
        scores[i * slots + tree.class_slot] += eta * tree.predict_row(data.row(i));
    }
}

/// Ordinary single-party GBDT on `columns` of `train`, every round on all rows.
pub fn train_gbdt(
    train: &Dataset,
    columns: &[usize],
    rounds: usize,
    max_depth: usize,
    eta: f64,
    params: &BoostParams,
) -> Result<Forest> {
    if columns.is_empty() || columns.iter().any(|&c| c >= train.cols()) {
        return Err(Error::param("columns", "empty or out-of-range column list"));
    }
    let edges = quantile_binning(train, params.bins)?;
    let binned = BinnedMatrix::new(train, &edges);
    let classes = train.class_count();
    let mut forest = Forest::new(eta, classes, train.cols());
    let slots = forest.slots();
    let mut scores = vec![0.0; train.rows() * slots];
    let all: Vec<usize> = (0..train.rows()).collect();
    for _ in 0..rounds {
        let grads = compute_gradients(train.labels(), &scores, forest.loss, classes)?;
        for (slot, g) in grads.iter().enumerate() {
            let ctx = GrowContext {
                binned: &binned,
                edges: &edges,
                columns,
                gradients: g,
                params,
            };
            let mut tree = train_local_tree(&ctx, &all, max_depth);
            tree.class_slot = slot;
            apply_tree(&mut scores, slots, train, &tree, eta);
            forest.trees.push(tree);
        }
    }
    forest.bin_edges = Some(edges);
    Ok(forest)
}
