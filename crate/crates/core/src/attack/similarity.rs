use crate::error::{Error, Result};
use crate::fedproto::log::{LeafAssignmentLog, LoggedTree};

/// Symmetric co-location frequency over the probe instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                data[a * n + b] = f(a, b);
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    /// Applies `perm` (new position `i` holds old instance `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.n, |a, b| self.get(perm[a], perm[b]))
    }
}

/// Incremental co-location counts for a fixed probe set.
#[derive(Debug, Clone)]
pub struct CoLocation {
    /// Training position → probe position.
    position: Vec<Option<usize>>,
    n: usize,
    counts: Vec<u32>,
    trees: usize,
    logged_leaves: usize,
}

impl CoLocation {
    pub fn new(probe: &[usize], instance_count: usize) -> Result<Self> {
        let mut position = vec![None; instance_count];
        for (p, &i) in probe.iter().enumerate() {
            if i >= instance_count {
                return Err(Error::param("probe", format!("instance {i} out of range")));
            }
            if position[i].is_some() {
                return Err(Error::param("probe", format!("instance {i} listed twice")));
            }
            position[i] = Some(p);
        }
        let n = probe.len();
        Ok(Self {
            position,
            n,
            counts: vec![0; n * n],
            trees: 0,
            logged_leaves: 0,
        })
    }

    pub fn add_tree(&mut self, tree: &LoggedTree) {
        self.trees += 1;
        self.logged_leaves += tree.leaves.len();
        for leaf in &tree.leaves {
            let members: Vec<usize> = leaf
                .instances
                .iter()
                .filter_map(|&i| self.position.get(i).copied().flatten())
                .collect();
            for &a in &members {
                for &b in &members {
                    self.counts[a * self.n + b] += 1;
                }
            }
        }
    }

    pub fn tree_count(&self) -> usize {
        self.trees
    }

    pub fn logged_leaves(&self) -> usize {
        self.logged_leaves
    }

    /// `S[a][b] = |{trees where a, b share a logged leaf}| / n_trees`.
    pub fn similarity(&self) -> SimilarityMatrix {
        let n_trees = self.trees.max(1) as f64;
        SimilarityMatrix {
            n: self.n,
            data: self.counts.iter().map(|&c| f64::from(c) / n_trees).collect(),
        }
    }
}

/// Similarity of the probe instances under every tree of `log`.
pub fn build_similarity(log: &LeafAssignmentLog, probe: &[usize]) -> Result<SimilarityMatrix> {
    if log.trees.is_empty() {
        return Err(Error::param("log", "attack not applicable: no federated trees"));
    }
    let mut co = CoLocation::new(probe, log.instance_count)?;
    for t in &log.trees {
        co.add_tree(t);
    }
    Ok(co.similarity())
}
