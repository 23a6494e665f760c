//! Local trees and the purity threshold against the clustering attack,
//! averaged over a few seeds.

use cmosb::boosting::BoostParams;
use cmosb::data::{train_test_split, vertical_partition, SyntheticSpec};
use cmosb::fedproto::{HeCostModel, TrainingConfig};
use cmosb::objectives::{ExperimentContext, ObjectiveVector};

fn mean(cfg: &TrainingConfig, seeds: &[u64]) -> cmosb::Result<ObjectiveVector> {
    let mut acc = ObjectiveVector::new(0.0, 0.0, 0.0);
    for &seed in seeds {
        let ds = SyntheticSpec::synthetic1(seed).generate()?;
        let split = train_test_split(&ds, seed)?;
        let ctx = ExperimentContext::new(
            ds.subset(&split.train_rows),
            ds.subset(&split.test_rows),
            vertical_partition(&ds, 5, seed)?,
            50,
            5,
            HeCostModel::default(),
            BoostParams::default(),
            seed,
            500.0,
        )?;
        let (_, o) = ctx.train(cfg, false)?;
        acc.utility_loss += o.utility_loss;
        acc.cost += o.cost;
        acc.leakage += o.leakage;
    }
    let k = seeds.len() as f64;
    Ok(ObjectiveVector::new(
        acc.utility_loss / k,
        acc.cost / k,
        acc.leakage / k,
    ))
}

fn main() -> cmosb::Result<()> {
    let seeds = [0, 1, 2];
    let base = TrainingConfig {
        n_f: 10,
        max_depth: 5,
        learning_rate: 0.1,
        ..TrainingConfig::default()
    };
    let mut rows = vec![("no defense".to_string(), base)];
    rows.push(("n_l = 5".into(), TrainingConfig { n_l: 5, ..base }));
    for p in [1.0, 0.9, 0.8, 0.7] {
        rows.push((
            format!("p = {p}"),
            TrainingConfig {
                purity_threshold: Some(p),
                ..base
            },
        ));
    }
    println!("{:<12} {:>9} {:>9} {:>9}", "setting", "eps_u", "eps_c", "eps_p");
    for (name, cfg) in rows {
        let o = mean(&cfg, &seeds)?;
        println!("{name:<12} {:>9.4} {:>9.2} {:>9.3}", o.utility_loss, o.cost, o.leakage);
    }
    Ok(())
}
