use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::he::HeCounters;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    /// Active → passive: encrypted gradients and hessians of the round's subsample.
    EncryptedGradients,
    /// Active → passive: instance space of the node being split.
    InstanceSpace,
    /// Passive → active: encrypted per-bin gradient statistics.
    EncryptedHistograms,
    /// Active → passive: winning split on a passive feature.
    SplitRequest,
    /// Passive → active: left instance set of the passive split.
    LeftInstanceSpace,
    /// Node handed to the active party under the purity threshold.
    LocalSubtree,
}

/// One protocol message. `node` is the node id within the round's tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub round: usize,
    pub class_slot: usize,
    pub node: Option<usize>,
    pub message_kind: MessageKind,
    pub payload_size: usize,
    pub counter_deltas: HeCounters,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn push(&mut self, record: TranscriptRecord) {
        self.records.push(record);
    }

    /// Sum of every record's counter deltas.
    pub fn replay_counters(&self) -> HeCounters {
        let mut total = HeCounters::default();
        for r in &self.records {
            total.accumulate(&r.counter_deltas);
        }
        total
    }

    /// Line-delimited JSON, one record per line.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { records })
    }
}
