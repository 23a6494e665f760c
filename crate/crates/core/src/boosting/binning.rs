use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Per-feature ascending cut values. A value `x` falls in bin `b` where `b` is
/// the number of edges strictly below `x`, so bin `b` is `(edges[b-1], edges[b]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEdges {
    pub edges: Vec<Vec<f64>>,
    pub bin_count: usize,
}

impl BinEdges {
    pub fn feature_bins(&self, feature: usize) -> usize {
        self.edges[feature].len() + 1
    }

    pub fn bin_of(&self, feature: usize, value: f64) -> usize {
        self.edges[feature].partition_point(|&e| e < value)
    }

    /// Upper edge of `bin`; routing sends `x <= threshold` left.
    pub fn threshold(&self, feature: usize, bin: usize) -> f64 {
        self.edges[feature][bin]
    }
}

/// Cut points at empirical quantiles of one column. A quantile that falls
/// inside a run of equal values is moved to the nearest run boundary, and
/// duplicate cuts collapse, so constant columns yield a single bin.
pub fn quantile_edges(values: &[f64], bins: usize) -> Vec<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    let mut cuts: Vec<usize> = Vec::new();
    if n < 2 {
        return Vec::new();
    }
    for k in 1..bins {
        let pos = k * n / bins;
        if pos == 0 || pos >= n {
            continue;
        }
        // nearest index j with v[j-1] < v[j], searching outwards, upward first
        let boundary = (0..n).find_map(|off| {
            let up = pos + off;
            if up < n && v[up - 1] < v[up] {
                return Some(up);
            }
            if off > 0 && pos > off && v[pos - off - 1] < v[pos - off] {
                return Some(pos - off);
            }
            None
        });
        if let Some(j) = boundary {
            cuts.push(j);
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    cuts.into_iter().map(|j| 0.5 * (v[j - 1] + v[j])).collect()
}

pub fn quantile_binning(train: &Dataset, bins: usize) -> Result<BinEdges> {
    if !(2..=256).contains(&bins) {
        return Err(Error::param("bins", format!("must lie in [2, 256], got {bins}")));
    }
    let edges = (0..train.cols())
        .map(|j| quantile_edges(&train.column(j), bins))
        .collect();
    Ok(BinEdges { edges, bin_count: bins })
}

/// Column-major bin indices of a dataset under fixed edges.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    columns: Vec<Vec<u8>>,
    rows: usize,
}

impl BinnedMatrix {
    pub fn new(data: &Dataset, edges: &BinEdges) -> Self {
        let columns = (0..data.cols())
            .map(|j| {
                (0..data.rows())
                    .map(|i| edges.bin_of(j, data.value(i, j)) as u8)
                    .collect()
            })
            .collect();
        Self {
            columns,
            rows: data.rows(),
        }
    }

    pub fn column(&self, j: usize) -> &[u8] {
        &self.columns[j]
    }

    pub fn bin(&self, row: usize, col: usize) -> usize {
        self.columns[col][row] as usize
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent quantile oracle: for each cut position k*n/B, the midpoint
    /// between neighbouring sorted values.
    fn naive_quantiles(values: &[f64], bins: usize) -> Vec<f64> {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (1..bins)
            .map(|k| {
                let p = k * v.len() / bins;
                (v[p - 1] + v[p]) / 2.0
            })
            .collect()
    }

    #[test]
    fn hundred_values_four_bins() {
        let values: Vec<f64> = (1..=100).map(f64::from).collect();
        let edges = quantile_edges(&values, 4);
        assert_eq!(edges, naive_quantiles(&values, 4));
        assert_eq!(edges, vec![25.5, 50.5, 75.5]);
        let be = BinEdges {
            edges: vec![edges],
            bin_count: 4,
        };
        let mut counts = [0; 4];
        for v in &values {
            counts[be.bin_of(0, *v)] += 1;
        }
        assert_eq!(counts, [25, 25, 25, 25]);
    }

    #[test]
    fn constant_feature_has_one_bin() {
        assert!(quantile_edges(&[3.0; 50], 32).is_empty());
    }

    #[test]
    fn binary_feature_cut_between_values() {
        assert_eq!(quantile_edges(&[0.0, 1.0, 0.0, 1.0], 2), vec![0.5]);
        // quantile lands inside the run of zeros; boundary moves to the run end
        assert_eq!(quantile_edges(&[0.0, 0.0, 0.0, 1.0], 2), vec![0.5]);
    }

    #[test]
    fn edges_strictly_increasing() {
        let values: Vec<f64> = (0..500).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let e = quantile_edges(&values, 32);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert!(e.len() <= 31);
    }

    #[test]
    fn bin_count_range_checked() {
        let ds = Dataset::new(2, 1, vec![0.0, 1.0], vec![0, 1], 2).unwrap();
        assert!(quantile_binning(&ds, 1).is_err());
        assert!(quantile_binning(&ds, 257).is_err());
        assert!(quantile_binning(&ds, 2).is_ok());
    }
}
