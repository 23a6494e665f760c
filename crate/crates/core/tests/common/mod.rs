#![allow(dead_code)]

use cmosb::boosting::BoostParams;
use cmosb::data::{train_test_split, vertical_partition, Dataset, SyntheticSpec};
use cmosb::fedproto::HeCostModel;
use cmosb::objectives::ExperimentContext;

/// Context with a 2/3 train split, first `active_features` columns active,
/// probe 50 per class and 5 known labels per class.
pub fn context(spec: SyntheticSpec) -> ExperimentContext {
    let ds = spec.generate().unwrap();
    let split = train_test_split(&ds, spec.seed).unwrap();
    ExperimentContext::new(
        ds.subset(&split.train_rows),
        ds.subset(&split.test_rows),
        vertical_partition(&ds, spec.active_features, spec.seed).unwrap(),
        50,
        5,
        HeCostModel::default(),
        BoostParams::default(),
        spec.seed,
        500.0,
    )
    .unwrap()
}

/// Context that trains and tests on the same rows.
pub fn context_full(ds: Dataset, active: usize, seed: u64) -> ExperimentContext {
    let partition = vertical_partition(&ds, active, seed).unwrap();
    ExperimentContext::new(
        ds.clone(),
        ds,
        partition,
        50,
        5,
        HeCostModel::default(),
        BoostParams::default(),
        seed,
        500.0,
    )
    .unwrap()
}

pub fn small_synthetic1(seed: u64, instances: usize) -> SyntheticSpec {
    SyntheticSpec {
        instances,
        ..SyntheticSpec::synthetic1(seed)
    }
}
