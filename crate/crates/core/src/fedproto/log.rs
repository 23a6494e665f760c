use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boosting::forest::check_schema_major;
use crate::error::{Error, Result};

pub const LOG_SCHEMA_VERSION: &str = "1.0";

/// Instance set of one leaf as seen by the passive party.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedLeaf {
    pub node: usize,
    /// Training-set row positions, ascending.
    pub instances: Vec<usize>,
}

/// Leaves of one federated tree whose routing path contains a passive split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedTree {
    /// 1-based federated round.
    pub round: usize,
    pub class_slot: usize,
    pub leaves: Vec<LoggedLeaf>,
}

/// What the passive party observes across federated training. Every
/// federated tree has an entry, even when none of its leaves is visible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafAssignmentLog {
    pub schema_version: String,
    pub instance_count: usize,
    pub class_count: usize,
    pub trees: Vec<LoggedTree>,
}

impl LeafAssignmentLog {
    pub fn new(instance_count: usize, class_count: usize) -> Self {
        Self {
            schema_version: LOG_SCHEMA_VERSION.to_string(),
            instance_count,
            class_count,
            trees: Vec::new(),
        }
    }

    pub fn entry_count(&self) -> usize {
        self.trees.iter().map(|t| t.leaves.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entry_count() == 0
    }

    /// Trees from federated rounds `1..=round`.
    pub fn through_round(&self, round: usize) -> LeafAssignmentLog {
        LeafAssignmentLog {
            trees: self.trees.iter().filter(|t| t.round <= round).cloned().collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_schema_major(&self.schema_version, LOG_SCHEMA_VERSION)?;
        for (t, tree) in self.trees.iter().enumerate() {
            let mut seen = vec![false; self.instance_count];
            for leaf in &tree.leaves {
                for &i in &leaf.instances {
                    if i >= self.instance_count {
                        return Err(Error::Schema(format!("tree {t}: instance {i} out of range")));
                    }
                    if seen[i] {
                        return Err(Error::Schema(format!("tree {t}: instance {i} in two leaves")));
                    }
                    seen[i] = true;
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let log: LeafAssignmentLog = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        log.validate()?;
        Ok(log)
    }
}
