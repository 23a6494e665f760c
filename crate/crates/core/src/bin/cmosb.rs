use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmosb::campaign::{cmd_attack, cmd_gen_data, cmd_optimize, cmd_plot, cmd_train, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "cmosb",
    version,
    about = "Federated SecureBoost training, label-inference attack and constrained hyperparameter search"
)]
struct Cli {
    /// Experiment config (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for concurrent evaluations (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print the default config and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic dataset as CSV with a JSON sidecar.
    GenData,
    /// Train one model and write the forest, leaf log and report.
    Train,
    /// Attack the leaf log written by `train`.
    Attack,
    /// Run the constrained search and evaluate the baselines.
    Optimize,
    /// Render the front and hypervolume trace written by `optimize` as SVG.
    Plot,
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.print_defaults {
        print!("{}", ExperimentConfig::default().to_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (gen-data, train, attack, optimize, plot)");
        return ExitCode::from(CONFIG_ERROR);
    };

    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(CONFIG_ERROR);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e}");
        return ExitCode::from(CONFIG_ERROR);
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("config error: --workers must be at least 1");
            return ExitCode::from(CONFIG_ERROR);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("runtime error: {e}");
            return ExitCode::from(RUNTIME_ERROR);
        }
    }

    let dir = cfg.out.clone();
    let outcome = match command {
        Command::GenData => cmd_gen_data(&cfg, &dir).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
        Command::Train => cmd_train(&cfg, &dir).map(|r| {
            println!(
                "epsilon_u={:.6} epsilon_c={:.6} epsilon_p={:.6} logged_leaves={}",
                r.epsilon_u, r.epsilon_c, r.epsilon_p, r.logged_leaves
            );
        }),
        Command::Attack => cmd_attack(&cfg, &dir).map(|r| {
            println!(
                "epsilon_p={:.6} clusters={:?} degenerate={}",
                r.epsilon_p, r.cluster_sizes, r.degenerate
            );
        }),
        Command::Optimize => cmd_optimize(&cfg, &dir).map(|o| {
            println!(
                "front={} evaluations={} trainings={} final_hv={:.6}",
                o.result.front.len(),
                o.result.evaluations,
                o.result.trainings,
                o.result.hv_trace.last().copied().unwrap_or(0.0)
            );
            for b in &o.baselines {
                println!(
                    "baseline {}: epsilon_u={:.6} epsilon_c={:.6} epsilon_p={:.6}",
                    b.name, b.objectives.utility_loss, b.objectives.cost, b.objectives.leakage
                );
            }
        }),
        Command::Plot => cmd_plot(&dir).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME_ERROR)
        }
    }
}
