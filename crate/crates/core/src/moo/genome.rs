use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fedproto::TrainingConfig;

/// Number of binary and real genes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenomeLayout {
    pub bits: usize,
    pub reals: usize,
}

/// Mixed chromosome. Real genes live in `[0, 1]` and are mapped onto
/// their parameter ranges at decode time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub bits: Vec<bool>,
    pub reals: Vec<f64>,
}

impl Genome {
    /// Fair-coin bits and uniform real genes.
    pub fn random(layout: GenomeLayout, rng: &mut impl Rng) -> Self {
        Self {
            bits: (0..layout.bits).map(|_| rng.random::<bool>()).collect(),
            reals: (0..layout.reals).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn layout(&self) -> GenomeLayout {
        GenomeLayout {
            bits: self.bits.len(),
            reals: self.reals.len(),
        }
    }

    /// Unsigned integer of `bits[start..start + len]`, most significant first.
    pub fn bit_int(&self, start: usize, len: usize) -> usize {
        self.bits[start..start + len]
            .iter()
            .fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }
}

/// `lo + gene·(hi − lo)` with the gene clamped to `[0, 1]`.
pub fn affine(gene: f64, lo: f64, hi: f64) -> f64 {
    lo + gene.clamp(0.0, 1.0) * (hi - lo)
}

/// Bits for `n_f`, `n_l` and `d`.
pub const N_F_BITS: usize = 4;
pub const N_L_BITS: usize = 4;
pub const DEPTH_BITS: usize = 3;

/// Hyperparameter search space of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub subsample: (f64, f64),
    pub purity: (f64, f64),
    pub learning_rate: (f64, f64),
    pub complete_secure: bool,
}

impl SearchSpace {
    /// Full ranges; binary campaigns narrow the purity threshold to `[0.7, 1]`.
    pub fn for_classes(classes: usize) -> Self {
        Self {
            subsample: (0.1, 1.0),
            purity: if classes == 2 { (0.7, 1.0) } else { (0.1, 1.0) },
            learning_rate: (0.01, 0.3),
            complete_secure: true,
        }
    }

    pub fn layout() -> GenomeLayout {
        GenomeLayout {
            bits: N_F_BITS + N_L_BITS + DEPTH_BITS,
            reals: 3,
        }
    }

    /// `n_f, n_l ∈ [1, 16]`, `d ∈ [1, 8]` from the bits; `r, p, η` affinely.
    pub fn decode(&self, g: &Genome) -> TrainingConfig {
        TrainingConfig {
            n_f: 1 + g.bit_int(0, N_F_BITS),
            n_l: 1 + g.bit_int(N_F_BITS, N_L_BITS),
            max_depth: 1 + g.bit_int(N_F_BITS + N_L_BITS, DEPTH_BITS),
            subsample: affine(g.reals[0], self.subsample.0, self.subsample.1),
            purity_threshold: Some(affine(g.reals[1], self.purity.0, self.purity.1)),
            learning_rate: affine(g.reals[2], self.learning_rate.0, self.learning_rate.1),
            complete_secure: self.complete_secure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genome(bit: bool, real: f64) -> Genome {
        Genome {
            bits: vec![bit; 11],
            reals: vec![real; 3],
        }
    }

    #[test]
    fn decode_bounds() {
        let s = SearchSpace::for_classes(10);
        let lo = s.decode(&genome(false, 0.0));
        assert_eq!((lo.n_f, lo.n_l, lo.max_depth), (1, 1, 1));
        let hi = s.decode(&genome(true, 1.0));
        assert_eq!((hi.n_f, hi.n_l, hi.max_depth), (16, 16, 8));
        assert_eq!(hi.purity_threshold, Some(1.0));
        assert_eq!(lo.purity_threshold, Some(0.1));
    }

    #[test]
    fn eta_affine_map() {
        let s = SearchSpace::for_classes(2);
        let c = s.decode(&genome(false, 0.55));
        assert!((c.learning_rate - 0.1695).abs() < 1e-12);
        assert!((c.purity_threshold.unwrap() - 0.865).abs() < 1e-12);
    }

    #[test]
    fn bit_int_is_msb_first() {
        let g = Genome {
            bits: vec![true, false, true, true],
            reals: vec![],
        };
        assert_eq!(g.bit_int(0, 4), 11);
        assert_eq!(g.bit_int(1, 2), 1);
    }
}
