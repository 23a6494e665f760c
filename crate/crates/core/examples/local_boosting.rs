//! Plaintext histogram GBDT: the active party alone versus the joint
//! feature space.

use cmosb::boosting::{train_gbdt, BoostParams};
use cmosb::data::{train_test_split, SyntheticSpec};
use cmosb::objectives::utility;

fn main() -> cmosb::Result<()> {
    let ds = SyntheticSpec::synthetic1(1).generate()?;
    let split = train_test_split(&ds, 1)?;
    let (train, test) = (ds.subset(&split.train_rows), ds.subset(&split.test_rows));
    let params = BoostParams::default();
    let active: Vec<usize> = (0..5).collect();
    let all: Vec<usize> = (0..10).collect();
    for (label, cols) in [("active only", &active), ("joint", &all)] {
        let forest = train_gbdt(&train, cols, 10, 4, 0.3, &params)?;
        println!(
            "{label:>12}: {} trees, test AUC {:.4}",
            forest.trees.len(),
            utility(&forest, &test)?
        );
    }

    let ds = SyntheticSpec::synthetic2(1).generate()?;
    let split = train_test_split(&ds, 1)?;
    let (train, test) = (ds.subset(&split.train_rows), ds.subset(&split.test_rows));
    let forest = train_gbdt(&train, &all, 5, 4, 0.3, &params)?;
    println!(
        "10 classes: {} trees (one per class per round), test accuracy {:.4}",
        forest.trees.len(),
        utility(&forest, &test)?
    );
    Ok(())
}
