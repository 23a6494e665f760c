//! A small constrained hyperparameter search on Synthetic1 with the
//! baselines and the exported artifacts.

use cmosb::campaign::{cmd_optimize, cmd_plot, ExperimentConfig};

fn main() -> cmosb::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.seed = 3;
    cfg.ga.population = 12;
    cfg.ga.generations = 6;
    cfg.out = std::env::temp_dir().join("cmosb_campaign");
    cfg.validate()?;
    let out = cmd_optimize(&cfg, &cfg.out)?;
    println!(
        "{} evaluations, {} trainings",
        out.result.evaluations, out.result.trainings
    );
    println!(
        "{:<10} {:>4} {:>4} {:>2} {:>6} {:>6} {:>6} {:>8} {:>9} {:>6}",
        "", "n_f", "n_l", "d", "r", "p", "eta", "eps_u", "eps_c", "eps_p"
    );
    for s in &out.result.front {
        let c = &s.config;
        let o = &s.objectives;
        println!(
            "{:<10} {:>4} {:>4} {:>2} {:>6.3} {:>6.3} {:>6.3} {:>8.4} {:>9.2} {:>6.3}",
            "front",
            c.n_f,
            c.n_l,
            c.max_depth,
            c.subsample,
            c.purity_threshold.unwrap_or(f64::NAN),
            c.learning_rate,
            o.utility_loss,
            o.cost,
            o.leakage
        );
    }
    for b in &out.baselines {
        let (c, o) = (&b.config, &b.objectives);
        println!(
            "{:<10} {:>4} {:>4} {:>2} {:>6.3} {:>6} {:>6.3} {:>8.4} {:>9.2} {:>6.3}",
            b.name, c.n_f, c.n_l, c.max_depth, c.subsample, "-", c.learning_rate, o.utility_loss, o.cost, o.leakage
        );
    }
    println!(
        "HV trace {:?}",
        out.result
            .hv_trace
            .iter()
            .map(|h| (h * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );
    for f in cmd_plot(&cfg.out)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
