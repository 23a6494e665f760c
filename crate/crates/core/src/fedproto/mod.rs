//! Two-party SecureBoost: HE backends and accounting, split finding, the
//! training loop with both label-leakage defenses, and the passive party's
//! leaf log.

pub mod he;
pub mod log;
pub mod paillier;
pub mod protocol;
pub mod sbo;
pub mod transcript;

pub use he::{AdditiveHe, BackendTag, CountingScheme, HeContext, HeCostModel, HeCounters};
pub use log::{LeafAssignmentLog, LoggedLeaf, LoggedTree};
pub use paillier::Paillier;
pub use protocol::{
    aggregate_encrypted, decrypt_histograms, node_purity, split_finding, EncryptedBin, EncryptedGradients,
    EncryptedHistogram, MessageScope, PartyView, SplitDecision,
};
pub use sbo::{sbo_train, BackendKind, RoundMetrics, SboSetup, TrainingConfig, TrainingOutcome};
pub use transcript::{MessageKind, Transcript, TranscriptRecord};
