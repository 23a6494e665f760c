use serde::{Deserialize, Serialize};

use super::binning::{BinEdges, BinnedMatrix};
use super::histogram::build_histogram;
use super::loss::GradientPair;
use super::split::{find_best_split, leaf_weight, SplitCandidate};
use super::BoostParams;

/// Which party owns (and can evaluate) a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Owner {
    /// Split found jointly, feature held by the active party.
    Active,
    /// Split found jointly, feature held by the passive party.
    Passive,
    /// Grown by the active party alone, invisible to the passive party.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    Local,
    Federated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        bin: usize,
        threshold: f64,
        left: usize,
        right: usize,
        owner: Owner,
    },
    Leaf {
        weight: f64,
        owner: Owner,
    },
}

impl Node {
    pub fn owner(&self) -> Owner {
        match self {
            Node::Split { owner, .. } | Node::Leaf { owner, .. } => *owner,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Binary tree stored as a node array; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub class_slot: usize,
    pub kind: TreeKind,
}

/// Everything needed to grow nodes on one party's columns.
pub struct GrowContext<'a> {
    pub binned: &'a BinnedMatrix,
    pub edges: &'a BinEdges,
    pub columns: &'a [usize],
    pub gradients: &'a [GradientPair],
    pub params: &'a BoostParams,
}

impl<'a> GrowContext<'a> {
    pub fn best_split(&self, instances: &[usize]) -> Option<SplitCandidate> {
        let hists: Vec<_> = self
            .columns
            .iter()
            .map(|&f| {
                (
                    f,
                    build_histogram(
                        self.binned.column(f),
                        self.edges.feature_bins(f),
                        instances,
                        self.gradients,
                    ),
                )
            })
            .collect();
        find_best_split(&hists, self.params)
    }

    pub fn leaf_weight(&self, instances: &[usize]) -> f64 {
        let (g, h) = instances.iter().fold((0.0, 0.0), |(g, h), &i| {
            (g + self.gradients[i].g, h + self.gradients[i].h)
        });
        leaf_weight(g, h, self.params.lambda)
    }
}

/// Splits `instances` by `bin <= cut` on `feature`, preserving order.
pub fn partition(binned: &BinnedMatrix, feature: usize, cut: usize, instances: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let col = binned.column(feature);
    instances.iter().partition(|&&i| (col[i] as usize) <= cut)
}

impl DecisionTree {
    pub fn new(class_slot: usize, kind: TreeKind) -> Self {
        Self {
            nodes: Vec::new(),
            class_slot,
            kind,
        }
    }

    /// Reserves a node slot (filled in later) and returns its id.
    pub fn reserve(&mut self) -> usize {
        self.nodes.push(Node::Leaf {
            weight: 0.0,
            owner: Owner::Local,
        });
        self.nodes.len() - 1
    }

    /// Depth-first, left-first growth on `ctx.columns` down to `max_depth`.
    /// Every node created is tagged `owner`.
    pub fn grow(
        &mut self,
        ctx: &GrowContext<'_>,
        instances: &[usize],
        depth: usize,
        max_depth: usize,
        owner: Owner,
    ) -> usize {
        let id = self.reserve();
        let split = if depth < max_depth {
            ctx.best_split(instances)
        } else {
            None
        };
        match split {
            None => {
                self.nodes[id] = Node::Leaf {
                    weight: ctx.leaf_weight(instances),
                    owner,
                };
            }
            Some(c) => {
                let (l, r) = partition(ctx.binned, c.feature, c.bin, instances);
                let left = self.grow(ctx, &l, depth + 1, max_depth, owner);
                let right = self.grow(ctx, &r, depth + 1, max_depth, owner);
                self.nodes[id] = Node::Split {
                    feature: c.feature,
                    bin: c.bin,
                    threshold: ctx.edges.threshold(c.feature, c.bin),
                    left,
                    right,
                    owner,
                };
            }
        }
        id
    }

    /// Node id of the leaf `row` (raw feature values) lands in.
    pub fn leaf_for(&self, row: &[f64]) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { .. } => return id,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => id = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.nodes[self.leaf_for(row)] {
            Node::Leaf { weight, .. } => *weight,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// Maximum root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn split_count(&self, owner: Owner) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf() && n.owner() == owner).count()
    }

    /// True if the node array forms a proper binary tree rooted at 0.
    pub fn is_well_formed(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if id >= self.nodes.len() || seen[id] {
                return false;
            }
            seen[id] = true;
            if let Node::Split { left, right, .. } = self.nodes[id] {
                stack.push(left);
                stack.push(right);
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Grows a standalone tree on one party's columns.
pub fn train_local_tree(ctx: &GrowContext<'_>, instances: &[usize], max_depth: usize) -> DecisionTree {
    let mut tree = DecisionTree::new(0, TreeKind::Local);
    tree.grow(ctx, instances, 0, max_depth, Owner::Local);
    tree
}
