use serde::{Deserialize, Serialize};

use super::histogram::{BinStats, Histogram};
use super::BoostParams;

/// Relative width within which two gains are treated as equal.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCandidate {
    pub feature: usize,
    /// Instances with bin `<= bin` go left.
    pub bin: usize,
    pub gain: f64,
    pub left_g: f64,
    pub left_h: f64,
    pub left_count: usize,
    pub right_g: f64,
    pub right_h: f64,
    pub right_count: usize,
}

/// Second-order split gain `½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)] − γ`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let g = gl + gr;
    let h = hl + hr;
    0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda)) - gamma
}

pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> f64 {
    -g / (h + lambda)
}

pub fn gains_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= GAIN_TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Every admissible cut of one feature's histogram, in ascending bin order.
pub fn enumerate_cuts(feature: usize, hist: &Histogram, params: &BoostParams) -> Vec<SplitCandidate> {
    let total = hist.total();
    let mut out = Vec::new();
    let mut left = BinStats::default();
    let last = hist.bins.len().saturating_sub(1);
    for (b, stats) in hist.bins.iter().enumerate().take(last) {
        left.g += stats.g;
        left.h += stats.h;
        left.count += stats.count;
        let right = BinStats {
            g: total.g - left.g,
            h: total.h - left.h,
            count: total.count - left.count,
        };
        if left.count == 0 || right.count == 0 {
            continue;
        }
        if left.h < params.min_child_weight || right.h < params.min_child_weight {
            continue;
        }
        out.push(SplitCandidate {
            feature,
            bin: b,
            gain: split_gain(left.g, left.h, right.g, right.h, params.lambda, params.gamma),
            left_g: left.g,
            left_h: left.h,
            left_count: left.count,
            right_g: right.g,
            right_h: right.h,
            right_count: right.count,
        });
    }
    out
}

/// Picks the highest-gain cut; gains within [`GAIN_TIE_TOLERANCE`] of the
/// maximum tie and the lowest `(feature, bin)` wins. Returns `None` when no
/// cut has positive gain.
pub fn find_best_split(histograms: &[(usize, Histogram)], params: &BoostParams) -> Option<SplitCandidate> {
    let candidates: Vec<SplitCandidate> = histograms
        .iter()
        .flat_map(|(f, h)| enumerate_cuts(*f, h, params))
        .collect();
    select_best(&candidates)
}

pub fn select_best(candidates: &[SplitCandidate]) -> Option<SplitCandidate> {
    let max = candidates.iter().map(|c| c.gain).fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return None;
    }
    candidates
        .iter()
        .filter(|c| gains_tied(c.gain, max))
        .min_by_key(|c| (c.feature, c.bin))
        .copied()
}
