use serde::{Deserialize, Serialize};

use super::similarity::SimilarityMatrix;
use crate::error::{Error, Result};

/// Cluster id per probe position. Ids are `0..count`, ordered by each
/// cluster's lowest member position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub cluster: Vec<usize>,
    pub count: usize,
    /// Set when the similarity carried too little structure and clusters
    /// were assigned by index blocks.
    pub degenerate: bool,
}

impl ClusterAssignment {
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.count];
        for &c in &self.cluster {
            s[c] += 1;
        }
        s
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.cluster.len()).filter(|&i| self.cluster[i] == c).collect()
    }

    fn canonical(raw: Vec<usize>, count: usize, degenerate: bool) -> Self {
        let mut remap = vec![usize::MAX; count.max(raw.iter().max().map_or(0, |m| m + 1))];
        let mut next = 0;
        let cluster = raw
            .into_iter()
            .map(|c| {
                if remap[c] == usize::MAX {
                    remap[c] = next;
                    next += 1;
                }
                remap[c]
            })
            .collect();
        Self {
            cluster,
            count,
            degenerate,
        }
    }
}

fn index_blocks(n: usize, c: usize) -> Vec<usize> {
    (0..n).map(|i| i * c / n).collect()
}

/// Average-linkage agglomerative clustering on `1 − S`, stopped at `c`
/// clusters.
///
/// Instances that never share a leaf with another probe instance carry no
/// information; they are left out of the linkage and attached to cluster 0.
/// If fewer than `c` instances remain, clusters fall back to index blocks
/// and the result is flagged degenerate. Among equal merge distances the
/// pair whose first cluster has the lowest index merges first.
pub fn cluster_instances(s: &SimilarityMatrix, c: usize) -> Result<ClusterAssignment> {
    let n = s.len();
    if c < 2 {
        return Err(Error::param("classes", "need at least 2 clusters"));
    }
    if c > n {
        return Err(Error::param("classes", format!("{c} clusters for {n} instances")));
    }

    let connected: Vec<usize> = (0..n)
        .filter(|&a| (0..n).any(|b| b != a && s.get(a, b) > 0.0))
        .collect();
    if connected.len() < c {
        return Ok(ClusterAssignment::canonical(index_blocks(n, c), c, true));
    }

    let labels = average_linkage(s, &connected, c);
    let mut raw = vec![usize::MAX; n];
    for (k, &a) in connected.iter().enumerate() {
        raw[a] = labels[k];
    }
    // isolated instances join whichever cluster holds the lowest position
    let first = raw.iter().copied().find(|&x| x != usize::MAX).unwrap_or(0);
    for r in raw.iter_mut() {
        if *r == usize::MAX {
            *r = first;
        }
    }
    Ok(ClusterAssignment::canonical(raw, c, false))
}

/// UPGMA with a nearest-neighbour cache. Returns a slot label per entry of
/// `points` (labels are arbitrary but consistent).
fn average_linkage(s: &SimilarityMatrix, points: &[usize], c: usize) -> Vec<usize> {
    let m = points.len();
    let mut dist = vec![0.0f64; m * m];
    for i in 0..m {
        for j in 0..m {
            dist[i * m + j] = 1.0 - s.get(points[i], points[j]);
        }
    }
    let mut size = vec![1usize; m];
    let mut alive = vec![true; m];
    let mut owner: Vec<usize> = (0..m).collect();

    let nearest = |dist: &[f64], alive: &[bool], a: usize| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for b in 0..m {
            if b != a && alive[b] && dist[a * m + b] < best.0 {
                best = (dist[a * m + b], b);
            }
        }
        best
    };
    let mut nn: Vec<(f64, usize)> = (0..m).map(|a| nearest(&dist, &alive, a)).collect();

    let mut clusters = m;
    while clusters > c {
        let mut a = usize::MAX;
        for i in 0..m {
            if alive[i] && (a == usize::MAX || nn[i].0 < nn[a].0) {
                a = i;
            }
        }
        let b = nn[a].1;
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };

        let (sk, sg) = (size[keep] as f64, size[gone] as f64);
        for k in 0..m {
            if alive[k] && k != keep && k != gone {
                let d = (sk * dist[keep * m + k] + sg * dist[gone * m + k]) / (sk + sg);
                dist[keep * m + k] = d;
                dist[k * m + keep] = d;
            }
        }
        size[keep] += size[gone];
        alive[gone] = false;
        for o in owner.iter_mut() {
            if *o == gone {
                *o = keep;
            }
        }
        clusters -= 1;

        nn[keep] = nearest(&dist, &alive, keep);
        for k in 0..m {
            if !alive[k] || k == keep {
                continue;
            }
            if nn[k].1 == keep || nn[k].1 == gone {
                nn[k] = nearest(&dist, &alive, k);
            } else {
                let d = dist[k * m + keep];
                if d < nn[k].0 || (d == nn[k].0 && keep < nn[k].1) {
                    nn[k] = (d, keep);
                }
            }
        }
    }
    owner
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(sizes: &[usize], within: f64, across: f64) -> SimilarityMatrix {
        let block: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat(b).take(s))
            .collect();
        SimilarityMatrix::from_fn(block.len(), |a, b| {
            if a == b {
                1.0
            } else if block[a] == block[b] {
                within
            } else {
                across
            }
        })
    }

    #[test]
    fn two_perfect_blocks() {
        let s = blocks(&[4, 6], 1.0, 0.0);
        let c = cluster_instances(&s, 2).unwrap();
        assert_eq!(c.cluster, vec![0, 0, 0, 0, 1, 1, 1, 1, 1, 1]);
        assert!(!c.degenerate);
    }

    #[test]
    fn three_perfect_blocks() {
        let s = blocks(&[3, 3, 3], 1.0, 0.0);
        let c = cluster_instances(&s, 3).unwrap();
        assert_eq!(c.cluster, vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
        assert_eq!(c.sizes(), vec![3, 3, 3]);
    }

    #[test]
    fn all_zero_is_degenerate() {
        let s = SimilarityMatrix::from_fn(6, |a, b| if a == b { 1.0 } else { 0.0 });
        let c = cluster_instances(&s, 2).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.cluster, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn argument_checks() {
        let s = blocks(&[2], 1.0, 0.0);
        assert!(cluster_instances(&s, 1).is_err());
        assert!(cluster_instances(&s, 3).is_err());
    }

    #[test]
    fn isolated_instances_do_not_steal_a_cluster() {
        // two blocks plus one instance that never co-locates
        let mut s = blocks(&[3, 3, 1], 1.0, 0.0);
        s = SimilarityMatrix::from_fn(7, |a, b| {
            if a == 6 || b == 6 {
                if a == b {
                    1.0
                } else {
                    0.0
                }
            } else {
                s.get(a, b)
            }
        });
        let c = cluster_instances(&s, 2).unwrap();
        assert_eq!(&c.cluster[..6], &[0, 0, 0, 1, 1, 1]);
    }
}
