//! Vertical federated gradient boosting (SecureBoost) with a homomorphic
//! encryption cost model, the instance clustering label-inference attack and
//! its two defenses, and a constrained NSGA-II search over training
//! hyperparameters.
//!
//! The crate is organised bottom-up:
//!
//! - [`data`]: synthetic generation, CSV ingestion, vertical partitioning and splits.
//! - [`boosting`]: plaintext histogram GBDT (gradients, binning, split gain, trees).
//! - [`fedproto`]: the two-party protocol, HE backends, cost accounting and defenses.
//! - [`attack`]: similarity matrix, clustering, label propagation and leakage score.
//! - [`objectives`]: utility loss, training cost, privacy leakage, cached evaluation.
//! - [`moo`]: genome encoding, variation operators, sorting, hypervolume, the GA loop.
//! - [`campaign`]: experiment configuration and the commands behind the `cmosb` binary.

pub mod attack;
pub mod boosting;
pub mod campaign;
pub mod data;
pub mod error;
pub mod fedproto;
pub mod moo;
pub mod objectives;
pub mod rng;

pub use error::{Error, Result};
