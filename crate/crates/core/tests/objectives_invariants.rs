mod common;

use cmosb::fedproto::{sbo_train, TrainingConfig};
use cmosb::objectives::{accuracy, auc, utility_loss, Evaluator};
use common::{context, small_synthetic1};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn auc_complement_symmetry(scores in prop::collection::hash_set(-1_000_000i64..1_000_000, 4..60), flip: u64) {
        let scores: Vec<f64> = scores.into_iter().map(|s| s as f64 / 1000.0).collect();
        let mut labels: Vec<usize> = (0..scores.len()).map(|i| ((flip >> (i % 64)) & 1) as usize).collect();
        labels[0] = 0;
        labels[1] = 1;
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let a = auc(&scores, &labels).unwrap();
        prop_assert!((a - (1.0 - auc(&neg, &labels).unwrap())).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn accuracy_is_exact(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..100)) {
        let (pred, truth): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
        let wrong = pairs.iter().filter(|(a, b)| a != b).count();
        prop_assert_eq!(accuracy(&pred, &truth).unwrap(), 1.0 - wrong as f64 / pairs.len() as f64);
    }
}

#[test]
fn objectives_stay_in_range() {
    for (seed, classes) in [(0u64, 2usize), (1, 3)] {
        let mut spec = small_synthetic1(seed, 600);
        spec.classes = classes;
        let ctx = context(spec);
        for cfg in [
            TrainingConfig::default(),
            TrainingConfig {
                n_l: 3,
                purity_threshold: Some(0.8),
                subsample: 0.3,
                ..TrainingConfig::default()
            },
        ] {
            let (out, v) = ctx.train(&cfg, false).unwrap();
            assert!(v.is_valid(), "{v:?}");
            assert_eq!(v.utility_loss, utility_loss(&out.forest, &ctx.test).unwrap());
        }
    }
}

#[test]
fn cost_strictly_increases_with_rounds() {
    let ctx = context(small_synthetic1(4, 600));
    for p in [None, Some(0.8)] {
        let mut last = -1.0;
        for n_f in 1..=6 {
            let cfg = TrainingConfig {
                n_f,
                purity_threshold: p,
                ..TrainingConfig::default()
            };
            let c = sbo_train(&cfg, &ctx.setup(17, false), &ctx.train).unwrap().epsilon_c;
            assert!(c > last, "n_f {n_f}: {c} after {last}");
            last = c;
        }
    }
}

#[test]
fn evaluator_caches_by_decoded_config() {
    let ev = Evaluator::new(context(small_synthetic1(5, 450)));
    let cfg = TrainingConfig::default();
    let a = ev.evaluate(&cfg);
    let b = ev.evaluate(&cfg);
    assert_eq!(a, b);
    assert_eq!(ev.trainings(), 1);
    ev.evaluate(&TrainingConfig { n_f: 2, ..cfg });
    assert_eq!(ev.trainings(), 2);
}
