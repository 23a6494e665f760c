//! Instance clustering label-inference attack, mounted by the passive party
//! on the leaf instance sets it observes.

pub mod cluster;
pub mod similarity;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub use cluster::{cluster_instances, ClusterAssignment};
pub use similarity::{build_similarity, CoLocation, SimilarityMatrix};

use crate::error::{Error, Result};
use crate::fedproto::log::LeafAssignmentLog;
use crate::rng::{rng_from, tags};

pub const REPORT_SCHEMA_VERSION: &str = "1.0";

/// Probe positions whose labels the attacker knows, per class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackerKnowledge {
    pub known: Vec<Vec<usize>>,
}

impl AttackerKnowledge {
    /// Draws `per_class` probe positions of each class (at least one each).
    pub fn sample(probe_labels: &[usize], classes: usize, per_class: usize, seed: u64) -> Result<Self> {
        if per_class == 0 {
            return Err(Error::param("known_per_class", "must be at least 1"));
        }
        let mut rng = rng_from(seed, tags::KNOWLEDGE);
        let mut known = Vec::with_capacity(classes);
        for k in 0..classes {
            let mut pos: Vec<usize> = (0..probe_labels.len()).filter(|&i| probe_labels[i] == k).collect();
            if pos.is_empty() {
                return Err(Error::Sampling {
                    class: k,
                    requested: 1,
                    available: 0,
                });
            }
            pos.shuffle(&mut rng);
            pos.truncate(per_class);
            pos.sort_unstable();
            known.push(pos);
        }
        Ok(Self { known })
    }

    /// Known label per probe position.
    fn label_map(&self, n: usize) -> Vec<Option<usize>> {
        let mut map = vec![None; n];
        for (k, list) in self.known.iter().enumerate() {
            for &i in list {
                if i < n {
                    map[i] = Some(k);
                }
            }
        }
        map
    }
}

/// Labels every probe position: majority of known labels within its cluster
/// (ties to the lowest class), or for clusters without known members the
/// label of the labeled cluster at the smallest average `1 − S` distance.
pub fn infer_labels(s: &SimilarityMatrix, clusters: &ClusterAssignment, knowledge: &AttackerKnowledge) -> Vec<usize> {
    let n = clusters.cluster.len();
    let classes = knowledge.known.len();
    let known = knowledge.label_map(n);
    let mut votes = vec![vec![0usize; classes]; clusters.count];
    for i in 0..n {
        if let Some(k) = known[i] {
            votes[clusters.cluster[i]][k] += 1;
        }
    }
    let mut label: Vec<Option<usize>> = votes
        .iter()
        .map(|v| {
            let max = *v.iter().max().unwrap_or(&0);
            (max > 0).then(|| v.iter().position(|&c| c == max).unwrap())
        })
        .collect();

    let members: Vec<Vec<usize>> = (0..clusters.count).map(|c| clusters.members(c)).collect();
    let avg_dist = |a: usize, b: usize| -> f64 {
        let total: f64 = members[a]
            .iter()
            .flat_map(|&x| members[b].iter().map(move |&y| (x, y)))
            .map(|(x, y)| 1.0 - s.get(x, y))
            .sum();
        total / (members[a].len() * members[b].len()).max(1) as f64
    };
    let resolved = label.clone();
    for c in 0..clusters.count {
        if resolved[c].is_some() {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for o in 0..clusters.count {
            if let Some(k) = resolved[o] {
                let d = avg_dist(c, o);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, k));
                }
            }
        }
        label[c] = Some(best.map_or(0, |(_, k)| k));
    }
    clusters.cluster.iter().map(|&c| label[c].unwrap_or(0)).collect()
}

/// Fraction of positions where `predicted` equals `truth`.
pub fn attack_accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::param("predicted", "length differs from the probe labels"));
    }
    if truth.is_empty() {
        return Err(Error::param("probe", "empty probe set"));
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Outcome of one attack run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub schema_version: String,
    pub epsilon_p: f64,
    pub probe_size: usize,
    pub class_count: usize,
    pub trees: usize,
    pub logged_leaves: usize,
    pub cluster_sizes: Vec<usize>,
    /// `confusion[cluster][class]` counts of probe instances.
    pub confusion: Vec<Vec<usize>>,
    /// Inferred label of each cluster.
    pub cluster_labels: Vec<usize>,
    /// Set when the log gave no usable structure (empty log or all-zero similarity).
    pub degenerate: bool,
}

impl AttackReport {
    fn chance(probe_size: usize, classes: usize, trees: usize) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            epsilon_p: 1.0 / classes as f64,
            probe_size,
            class_count: classes,
            trees,
            logged_leaves: 0,
            cluster_sizes: Vec::new(),
            confusion: Vec::new(),
            cluster_labels: Vec::new(),
            degenerate: true,
        }
    }
}

/// Attack on an accumulated co-location state.
pub fn attack_colocation(
    co: &CoLocation,
    probe_labels: &[usize],
    classes: usize,
    knowledge: &AttackerKnowledge,
) -> Result<AttackReport> {
    if co.logged_leaves() == 0 {
        return Ok(AttackReport::chance(probe_labels.len(), classes, co.tree_count()));
    }
    let s = co.similarity();
    let clusters = cluster_instances(&s, classes)?;
    let predicted = infer_labels(&s, &clusters, knowledge);
    let epsilon_p = attack_accuracy(&predicted, probe_labels)?;
    let mut confusion = vec![vec![0usize; classes]; clusters.count];
    let mut cluster_labels = vec![0usize; clusters.count];
    for (i, &c) in clusters.cluster.iter().enumerate() {
        confusion[c][probe_labels[i]] += 1;
        cluster_labels[c] = predicted[i];
    }
    Ok(AttackReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        epsilon_p,
        probe_size: probe_labels.len(),
        class_count: classes,
        trees: co.tree_count(),
        logged_leaves: co.logged_leaves(),
        cluster_sizes: clusters.sizes(),
        confusion,
        cluster_labels,
        degenerate: clusters.degenerate,
    })
}

/// Full attack on a leaf log. `probe` holds training positions and
/// `labels` the training labels; the report's ε_p is `1/C` when the log
/// holds no visible leaf.
pub fn run_attack(
    log: &LeafAssignmentLog,
    probe: &[usize],
    labels: &[usize],
    knowledge: &AttackerKnowledge,
) -> Result<AttackReport> {
    let classes = log.class_count;
    let probe_labels: Vec<usize> = probe.iter().map(|&i| labels[i]).collect();
    let mut co = CoLocation::new(probe, log.instance_count)?;
    for t in &log.trees {
        co.add_tree(t);
    }
    attack_colocation(&co, &probe_labels, classes, knowledge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fedproto::log::{LoggedLeaf, LoggedTree};

    #[test]
    fn perfect_clusters_one_known_each() {
        let s = SimilarityMatrix::from_fn(6, |a, b| if (a < 3) == (b < 3) { 1.0 } else { 0.0 });
        let c = cluster_instances(&s, 2).unwrap();
        let k = AttackerKnowledge {
            known: vec![vec![4], vec![0]],
        };
        assert_eq!(infer_labels(&s, &c, &k), vec![1, 1, 1, 0, 0, 0]);
    }

    #[test]
    fn majority_vote_with_tie_to_lowest() {
        let c = ClusterAssignment {
            cluster: vec![0, 0, 0, 0, 1, 1],
            count: 2,
            degenerate: false,
        };
        let s = SimilarityMatrix::from_fn(6, |_, _| 1.0);
        let k = AttackerKnowledge {
            known: vec![vec![0, 1, 4], vec![2, 5]],
        };
        let p = infer_labels(&s, &c, &k);
        assert_eq!(p[0], 0); // {0,0,1}
        assert_eq!(p[4], 0); // {0,1} tie
    }

    #[test]
    fn unlabeled_cluster_takes_nearest_label() {
        // cluster 2 is close to cluster 1 (0.8) and far from cluster 0 (0.1)
        let block = [0, 0, 1, 1, 2, 2];
        let s = SimilarityMatrix::from_fn(6, |a, b| {
            let (x, y) = (block[a], block[b]);
            if x == y {
                1.0
            } else if (x, y) == (1, 2) || (x, y) == (2, 1) {
                0.8
            } else {
                0.1
            }
        });
        let c = ClusterAssignment {
            cluster: block.to_vec(),
            count: 3,
            degenerate: false,
        };
        let k = AttackerKnowledge {
            known: vec![vec![0], vec![2]],
        };
        let p = infer_labels(&s, &c, &k);
        assert_eq!(p, vec![0, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(attack_accuracy(&[0, 1, 1], &[0, 1, 1]).unwrap(), 1.0);
        assert_eq!(attack_accuracy(&[1, 0], &[0, 1]).unwrap(), 0.0);
        assert!(attack_accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn empty_log_is_chance() {
        let mut log = LeafAssignmentLog::new(10, 2);
        log.trees.push(LoggedTree {
            round: 1,
            class_slot: 0,
            leaves: vec![],
        });
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let probe: Vec<usize> = (0..10).collect();
        let k = AttackerKnowledge::sample(&labels, 2, 2, 0).unwrap();
        let r = run_attack(&log, &probe, &labels, &k).unwrap();
        assert_eq!(r.epsilon_p, 0.5);
        assert!(r.degenerate);
    }

    #[test]
    fn pure_single_tree_is_perfect() {
        let mut log = LeafAssignmentLog::new(8, 2);
        log.trees.push(LoggedTree {
            round: 1,
            class_slot: 0,
            leaves: vec![
                LoggedLeaf {
                    node: 1,
                    instances: vec![0, 2, 4, 6],
                },
                LoggedLeaf {
                    node: 2,
                    instances: vec![1, 3, 5, 7],
                },
            ],
        });
        let labels: Vec<usize> = (0..8).map(|i| i % 2).collect();
        let probe: Vec<usize> = (0..8).collect();
        let k = AttackerKnowledge::sample(&labels, 2, 1, 3).unwrap();
        let r = run_attack(&log, &probe, &labels, &k).unwrap();
        assert_eq!(r.epsilon_p, 1.0);
        assert_eq!(r.cluster_sizes, vec![4, 4]);
    }
}
