//! Federated training on Synthetic1 with per-round cost and leakage.

use cmosb::boosting::BoostParams;
use cmosb::data::{train_test_split, vertical_partition, SyntheticSpec};
use cmosb::fedproto::{HeCostModel, TrainingConfig};
use cmosb::objectives::ExperimentContext;

fn main() -> cmosb::Result<()> {
    let seed = 7;
    let ds = SyntheticSpec::synthetic1(seed).generate()?;
    let split = train_test_split(&ds, seed)?;
    let partition = vertical_partition(&ds, 5, seed)?;
    let ctx = ExperimentContext::new(
        ds.subset(&split.train_rows),
        ds.subset(&split.test_rows),
        partition,
        50,
        5,
        HeCostModel::default(),
        BoostParams::default(),
        seed,
        500.0,
    )?;
    let config = TrainingConfig {
        n_f: 10,
        max_depth: 5,
        ..TrainingConfig::default()
    };
    let (out, obj) = ctx.train(&config, true)?;
    println!("round  cost[s]  leakage  logged  |subsample|");
    for r in &out.rounds {
        println!(
            "{:>5} {:>8.3} {:>8.3} {:>7} {:>12}",
            r.round, r.cost_seconds, r.leakage, r.logged_leaves, r.subsample_size
        );
    }
    println!(
        "epsilon_u = {:.4}, epsilon_c = {:.3} s, epsilon_p = {:.3}",
        obj.utility_loss, obj.cost, obj.leakage
    );
    let transcript = out.transcript.expect("recorded");
    println!(
        "transcript: {} messages, counters replay to {:?}",
        transcript.records.len(),
        transcript.replay_counters()
    );
    Ok(())
}
