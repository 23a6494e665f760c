//! Message-level simulation of one SecureBoost split-finding exchange.

use crate::boosting::split::{enumerate_cuts, gains_tied};
use crate::boosting::tree::partition;
use crate::boosting::{
    build_histogram, BinEdges, BinStats, BinnedMatrix, BoostParams, GradientPair, Histogram, Owner, SplitCandidate,
};
use crate::error::{Error, Result};

use super::he::{AdditiveHe, HeContext};
use super::transcript::{MessageKind, Transcript, TranscriptRecord};

/// One party's columns over the shared binning of the training set.
#[derive(Clone, Copy)]
pub struct PartyView<'a> {
    pub binned: &'a BinnedMatrix,
    pub edges: &'a BinEdges,
    pub columns: &'a [usize],
}

/// Encrypted `(g, h)` per training instance; `None` outside the round's subsample.
pub struct EncryptedGradients<C> {
    pub pairs: Vec<Option<(C, C)>>,
}

impl<C: Clone> EncryptedGradients<C> {
    /// Encrypts the pairs of `subsample` (2 encryptions each).
    pub fn encrypt<S: AdditiveHe<Ciphertext = C>>(
        he: &mut HeContext<S>,
        gradients: &[GradientPair],
        subsample: &[usize],
    ) -> Result<Self> {
        let mut pairs = vec![None; gradients.len()];
        for &i in subsample {
            let g = he.encrypt(gradients[i].g)?;
            let h = he.encrypt(gradients[i].h)?;
            pairs[i] = Some((g, h));
        }
        Ok(Self { pairs })
    }
}

#[derive(Debug, Clone)]
pub struct EncryptedBin<C> {
    pub g: C,
    pub h: C,
    pub count: usize,
}

/// Passive-side histogram of one feature; only populated bins hold ciphertexts.
#[derive(Debug, Clone)]
pub struct EncryptedHistogram<C> {
    pub feature: usize,
    pub bins: Vec<Option<EncryptedBin<C>>>,
}

impl<C> EncryptedHistogram<C> {
    pub fn populated(&self) -> usize {
        self.bins.iter().filter(|b| b.is_some()).count()
    }
}

/// Passive party: sums ciphertexts per bin. The first ciphertext placed in
/// an empty bin is an assignment; every further one costs one addition per
/// statistic.
pub fn aggregate_encrypted<S: AdditiveHe>(
    he: &mut HeContext<S>,
    passive: &PartyView<'_>,
    encrypted: &EncryptedGradients<S::Ciphertext>,
    instances: &[usize],
) -> Result<Vec<EncryptedHistogram<S::Ciphertext>>> {
    let mut out = Vec::with_capacity(passive.columns.len());
    for &f in passive.columns {
        let col = passive.binned.column(f);
        let mut bins: Vec<Option<EncryptedBin<S::Ciphertext>>> = vec![None; passive.edges.feature_bins(f)];
        for &i in instances {
            let (g, h) = encrypted.pairs[i]
                .as_ref()
                .ok_or_else(|| Error::param("instances", format!("instance {i} has no encrypted gradients")))?;
            let slot = &mut bins[col[i] as usize];
            match slot {
                None => {
                    *slot = Some(EncryptedBin {
                        g: g.clone(),
                        h: h.clone(),
                        count: 1,
                    })
                }
                Some(bin) => {
                    bin.g = he.add(&bin.g, g);
                    bin.h = he.add(&bin.h, h);
                    bin.count += 1;
                }
            }
        }
        out.push(EncryptedHistogram { feature: f, bins });
    }
    Ok(out)
}

/// Active party: decrypts the populated bins (two decryptions each).
pub fn decrypt_histograms<S: AdditiveHe>(
    he: &mut HeContext<S>,
    encrypted: &[EncryptedHistogram<S::Ciphertext>],
) -> Result<Vec<(usize, Histogram)>> {
    encrypted
        .iter()
        .map(|eh| {
            let mut hist = Histogram::zeros(eh.bins.len());
            for (b, bin) in eh.bins.iter().enumerate() {
                if let Some(bin) = bin {
                    hist.bins[b] = BinStats {
                        g: he.decrypt(&bin.g)?,
                        h: he.decrypt(&bin.h)?,
                        count: bin.count,
                    };
                }
            }
            Ok((eh.feature, hist))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitDecision {
    /// No admissible cut with positive gain.
    Leaf,
    Split {
        owner: Owner,
        candidate: SplitCandidate,
        left: Vec<usize>,
        right: Vec<usize>,
    },
}

/// Round, class slot and node a protocol exchange belongs to.
#[derive(Debug, Clone, Copy)]
pub struct MessageScope {
    pub round: usize,
    pub class_slot: usize,
    pub node: Option<usize>,
}

pub(crate) fn record(
    transcript: &mut Option<&mut Transcript>,
    scope: MessageScope,
    kind: MessageKind,
    payload_size: usize,
    counter_deltas: super::he::HeCounters,
) {
    if let Some(t) = transcript.as_deref_mut() {
        t.push(TranscriptRecord {
            round: scope.round,
            class_slot: scope.class_slot,
            node: scope.node,
            message_kind: kind,
            payload_size,
            counter_deltas,
        });
    }
}

/// Finds the best split of node `instances` over both parties' features.
///
/// `passive` is `None` when the passive party sits this node out (the
/// first federated tree under `complete_secure`). Gains within the tie
/// tolerance prefer the active party, then the lowest `(feature, bin)`.
#[allow(clippy::too_many_arguments)]
pub fn split_finding<S: AdditiveHe>(
    he: &mut HeContext<S>,
    instances: &[usize],
    encrypted: &EncryptedGradients<S::Ciphertext>,
    gradients: &[GradientPair],
    active: &PartyView<'_>,
    passive: Option<&PartyView<'_>>,
    params: &BoostParams,
    scope: MessageScope,
    mut transcript: Option<&mut Transcript>,
) -> Result<SplitDecision> {
    // (party rank, candidate): active = 0 wins ties
    let mut candidates: Vec<(u8, SplitCandidate)> = Vec::new();

    if let Some(pv) = passive {
        record(
            &mut transcript,
            scope,
            MessageKind::InstanceSpace,
            instances.len(),
            Default::default(),
        );
        let before = he.counters();
        let enc_hists = aggregate_encrypted(he, pv, encrypted, instances)?;
        let payload = 2 * enc_hists.iter().map(|h| h.populated()).sum::<usize>();
        let hists = decrypt_histograms(he, &enc_hists)?;
        record(
            &mut transcript,
            scope,
            MessageKind::EncryptedHistograms,
            payload,
            he.counters().since(&before),
        );
        for (f, h) in &hists {
            candidates.extend(enumerate_cuts(*f, h, params).into_iter().map(|c| (1u8, c)));
        }
    }

    for &f in active.columns {
        let h = build_histogram(
            active.binned.column(f),
            active.edges.feature_bins(f),
            instances,
            gradients,
        );
        candidates.extend(enumerate_cuts(f, &h, params).into_iter().map(|c| (0u8, c)));
    }

    let max = candidates.iter().map(|(_, c)| c.gain).fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Ok(SplitDecision::Leaf);
    }
    let (party, best) = candidates
        .into_iter()
        .filter(|(_, c)| gains_tied(c.gain, max))
        .min_by_key(|(p, c)| (*p, c.feature, c.bin))
        .expect("max is attained");

    let (owner, binned) = if party == 0 {
        (Owner::Active, active.binned)
    } else {
        let pv = passive.expect("passive candidate implies passive view");
        record(&mut transcript, scope, MessageKind::SplitRequest, 1, Default::default());
        (Owner::Passive, pv.binned)
    };
    let (left, right) = partition(binned, best.feature, best.bin, instances);
    if owner == Owner::Passive {
        record(
            &mut transcript,
            scope,
            MessageKind::LeftInstanceSpace,
            left.len(),
            Default::default(),
        );
    }
    Ok(SplitDecision::Split {
        owner,
        candidate: best,
        left,
        right,
    })
}

/// Fraction of `instances` in their majority class.
pub fn node_purity(instances: &[usize], labels: &[usize], classes: usize) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::param("instances", "purity of an empty node is undefined"));
    }
    let mut counts = vec![0usize; classes];
    for &i in instances {
        counts[labels[i]] += 1;
    }
    let max = counts.into_iter().max().unwrap_or(0);
    Ok(max as f64 / instances.len() as f64)
}
