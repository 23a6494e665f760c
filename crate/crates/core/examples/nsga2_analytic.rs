//! NSGA-II on minimize (x², (x − 2)²), whose Pareto set is x ∈ [0, 2].

use cmosb::moo::{hypervolume, nsga2_run, Constraints, GaConfig, TwoParabolas};

fn main() -> cmosb::Result<()> {
    let ga = GaConfig {
        generations: 20,
        seed: 11,
        ..GaConfig::default()
    };
    let z = TwoParabolas::REFERENCE;
    let run = nsga2_run(&TwoParabolas, &ga, &Constraints::none(), &z)?;
    for (g, hv) in run.hv_trace.iter().enumerate().step_by(5) {
        println!("generation {g:>2}: archive HV {hv:.4}");
    }
    let pts: Vec<Vec<f64>> = run.front.iter().map(|i| i.raw.clone()).collect();
    let mut xs: Vec<f64> = run
        .front
        .iter()
        .map(|i| TwoParabolas::decode(i.genome.reals[0]))
        .collect();
    xs.sort_by(f64::total_cmp);
    println!(
        "front: {} points, x from {:.3} to {:.3}",
        xs.len(),
        xs[0],
        xs[xs.len() - 1]
    );
    println!(
        "front HV {:.4} of optimum {:.4}",
        hypervolume(&pts, &z),
        TwoParabolas::OPTIMAL_HV
    );
    Ok(())
}
