//! The passive party's label-inference attack on a leaf log.

use cmosb::attack::run_attack;
use cmosb::boosting::BoostParams;
use cmosb::data::{vertical_partition, SyntheticSpec};
use cmosb::fedproto::{HeCostModel, LeafAssignmentLog, TrainingConfig};
use cmosb::objectives::ExperimentContext;

fn main() -> cmosb::Result<()> {
    let seed = 7;
    let spec = SyntheticSpec {
        instances: 400,
        class_sep: 3.0,
        ..SyntheticSpec::synthetic1(seed)
    };
    let ds = spec.generate()?;
    let partition = vertical_partition(&ds, 5, seed)?;
    let ctx = ExperimentContext::new(
        ds.clone(),
        ds,
        partition,
        50,
        5,
        HeCostModel::default(),
        BoostParams::default(),
        seed,
        500.0,
    )?;
    let (out, _) = ctx.train(&TrainingConfig::default(), false)?;
    let report = run_attack(&out.log, &ctx.probe, ctx.train.labels(), &ctx.knowledge)?;
    println!(
        "logged leaves {}, attack accuracy {:.3}",
        report.logged_leaves, report.epsilon_p
    );
    for (c, row) in report.confusion.iter().enumerate() {
        println!(
            "cluster {c} (labelled {}): class counts {row:?}",
            report.cluster_labels[c]
        );
    }

    let empty = LeafAssignmentLog::new(ctx.train.rows(), 2);
    let chance = run_attack(&empty, &ctx.probe, ctx.train.labels(), &ctx.knowledge)?;
    println!(
        "empty log: accuracy {} (degenerate = {})",
        chance.epsilon_p, chance.degenerate
    );
    Ok(())
}
