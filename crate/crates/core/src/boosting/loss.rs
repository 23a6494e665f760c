use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First- and second-order gradient of the loss for one instance and class slot.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GradientPair {
    pub g: f64,
    pub h: f64,
}

impl GradientPair {
    pub fn new(g: f64, h: f64) -> Self {
        Self { g, h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Logistic,
    Softmax,
}

impl LossKind {
    pub fn for_classes(classes: usize) -> Self {
        if classes == 2 {
            LossKind::Logistic
        } else {
            LossKind::Softmax
        }
    }

    /// Number of raw scores (and trees per boosting round) per instance.
    pub fn slots(self, classes: usize) -> usize {
        match self {
            LossKind::Logistic => 1,
            LossKind::Softmax => classes,
        }
    }
}

pub fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable softmax of one row of scores.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Gradients per class slot: `out[k][i]` is instance `i`'s pair for slot `k`.
///
/// `raw_scores` is row-major with `slots` scores per instance.
pub fn compute_gradients(
    labels: &[usize],
    raw_scores: &[f64],
    loss: LossKind,
    classes: usize,
) -> Result<Vec<Vec<GradientPair>>> {
    let slots = loss.slots(classes);
    if raw_scores.len() != labels.len() * slots {
        return Err(Error::param(
            "raw_scores",
            format!(
                "expected {} scores for {} labels, got {}",
                labels.len() * slots,
                labels.len(),
                raw_scores.len()
            ),
        ));
    }
    if loss == LossKind::Logistic && classes != 2 {
        return Err(Error::param("loss", "logistic loss needs exactly 2 classes"));
    }
    let n = labels.len();
    let mut out = vec![Vec::with_capacity(n); slots];
    match loss {
        LossKind::Logistic => {
            for (i, &y) in labels.iter().enumerate() {
                let p = sigmoid(raw_scores[i]);
                out[0].push(GradientPair::new(p - y as f64, p * (1.0 - p)));
            }
        }
        LossKind::Softmax => {
            for (i, &y) in labels.iter().enumerate() {
                let p = softmax(&raw_scores[i * slots..(i + 1) * slots]);
                for (k, pk) in p.into_iter().enumerate() {
                    let target = if k == y { 1.0 } else { 0.0 };
                    out[k].push(GradientPair::new(pk - target, pk * (1.0 - pk)));
                }
            }
        }
    }
    Ok(out)
}

/// Mean negative log-likelihood of the labels under the raw scores.
pub fn mean_loss(labels: &[usize], raw_scores: &[f64], loss: LossKind, classes: usize) -> f64 {
    let slots = loss.slots(classes);
    let n = labels.len().max(1) as f64;
    let total: f64 = labels
        .iter()
        .enumerate()
        .map(|(i, &y)| match loss {
            LossKind::Logistic => {
                let s = raw_scores[i];
                // log(1 + e^s) - y s, computed stably
                let softplus = if s > 0.0 {
                    s + (-s).exp().ln_1p()
                } else {
                    s.exp().ln_1p()
                };
                softplus - y as f64 * s
            }
            LossKind::Softmax => {
                let row = &raw_scores[i * slots..(i + 1) * slots];
                let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + row.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
                lse - row[y]
            }
        })
        .sum();
    total / n
}
