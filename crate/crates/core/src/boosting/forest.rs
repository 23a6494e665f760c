use std::path::Path;

use serde::{Deserialize, Serialize};

use super::binning::BinEdges;
use super::loss::LossKind;
use super::tree::{DecisionTree, Node};
use crate::data::Dataset;
use crate::error::{Error, Result};

pub const FOREST_SCHEMA_VERSION: &str = "1.0";

/// Boosted ensemble. Scores are `Σ η · leaf_weight` per class slot, starting from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub schema_version: String,
    pub trees: Vec<DecisionTree>,
    pub learning_rate: f64,
    pub loss: LossKind,
    pub class_count: usize,
    pub feature_count: usize,
    pub bin_edges: Option<BinEdges>,
}

impl Forest {
    pub fn new(learning_rate: f64, class_count: usize, feature_count: usize) -> Self {
        Self {
            schema_version: FOREST_SCHEMA_VERSION.to_string(),
            trees: Vec::new(),
            learning_rate,
            loss: LossKind::for_classes(class_count),
            class_count,
            feature_count,
            bin_edges: None,
        }
    }

    pub fn slots(&self) -> usize {
        self.loss.slots(self.class_count)
    }

    /// Row-major raw scores, `slots()` per row.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.cols() != self.feature_count {
            return Err(Error::param(
                "features",
                format!("model expects {} columns, got {}", self.feature_count, data.cols()),
            ));
        }
        let slots = self.slots();
        let mut out = vec![0.0; data.rows() * slots];
        for i in 0..data.rows() {
            let row = data.row(i);
            for t in &self.trees {
                out[i * slots + t.class_slot] += self.learning_rate * t.predict_row(row);
            }
        }
        Ok(out)
    }

    /// Predicted class per row.
    pub fn predict_class(&self, data: &Dataset) -> Result<Vec<usize>> {
        let scores = self.predict(data)?;
        let slots = self.slots();
        Ok(match self.loss {
            LossKind::Logistic => scores.iter().map(|&s| usize::from(s > 0.0)).collect(),
            LossKind::Softmax => scores
                .chunks(slots)
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .fold(
                            (0, f64::NEG_INFINITY),
                            |best, (k, &s)| if s > best.1 { (k, s) } else { best },
                        )
                        .0
                })
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let forest: Forest = serde_json::from_str(text)?;
        check_schema_major(&forest.schema_version, FOREST_SCHEMA_VERSION)?;
        for (t, tree) in forest.trees.iter().enumerate() {
            if !tree.is_well_formed() {
                return Err(Error::Schema(format!("tree {t} is not a proper binary tree")));
            }
            for node in &tree.nodes {
                if let Node::Split { feature, .. } = node {
                    if *feature >= forest.feature_count {
                        return Err(Error::Schema(format!("tree {t} splits on unknown feature {feature}")));
                    }
                }
            }
        }
        Ok(forest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Rejects documents whose major version differs from ours.
pub fn check_schema_major(found: &str, expected: &str) -> Result<()> {
    let major = |v: &str| v.split('.').next().unwrap_or("").to_string();
    if major(found) != major(expected) {
        return Err(Error::Schema(format!(
            "unsupported schema_version {found} (expected {expected})"
        )));
    }
    Ok(())
}
