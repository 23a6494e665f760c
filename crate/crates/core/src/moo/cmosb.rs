use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::genome::{Genome, GenomeLayout, SearchSpace};
use super::nsga2::{nsga2_run, Constraints, GaConfig, Problem, RunResult};
use crate::error::Result;
use crate::fedproto::TrainingConfig;
use crate::objectives::{Evaluator, ObjectiveVector};

pub const FRONT_SCHEMA_VERSION: &str = "1.0";

/// SecureBoost hyperparameter search as a [`Problem`].
pub struct CmosbProblem<'a> {
    pub evaluator: &'a Evaluator,
    pub space: SearchSpace,
}

impl Problem for CmosbProblem<'_> {
    fn layout(&self) -> GenomeLayout {
        SearchSpace::layout()
    }

    fn evaluate(&self, genome: &Genome) -> Vec<f64> {
        self.evaluator.evaluate(&self.space.decode(genome)).to_vec()
    }
}

/// A decoded solution with raw objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub generation: usize,
    pub config: TrainingConfig,
    pub objectives: ObjectiveVector,
}

/// Campaign outcome: the final front, the full archive and the HV trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmosbResult {
    pub schema_version: String,
    pub reference: Vec<f64>,
    pub front: Vec<Solution>,
    pub archive: Vec<Solution>,
    pub hv_trace: Vec<f64>,
    pub evaluations: usize,
    pub trainings: usize,
}

impl CmosbResult {
    /// Members of the archive front up to `generation`.
    pub fn archive_front(&self, generation: usize) -> Vec<&Solution> {
        let idx: Vec<usize> = (0..self.archive.len())
            .filter(|&i| self.archive[i].generation <= generation)
            .collect();
        let pts: Vec<Vec<f64>> = idx.iter().map(|&i| self.archive[i].objectives.to_vec()).collect();
        super::pareto::non_dominated(&pts)
            .into_iter()
            .map(|k| &self.archive[idx[k]])
            .collect()
    }

    /// Normalized archive hypervolume up to `generation` against `z`.
    pub fn archive_hv(&self, generation: usize, z: &[f64]) -> f64 {
        let pts: Vec<Vec<f64>> = self
            .archive
            .iter()
            .filter(|s| s.generation <= generation)
            .map(|s| s.objectives.to_vec())
            .collect();
        super::hypervolume::normalized_hypervolume(&pts, z)
    }

    pub fn write_front_csv(&self, path: &Path) -> Result<()> {
        write_solutions_csv(&self.front, path)
    }

    pub fn write_archive_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn write_hv_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "generation,hypervolume")?;
        for (g, hv) in self.hv_trace.iter().enumerate() {
            writeln!(f, "{g},{hv}")?;
        }
        f.flush()?;
        Ok(())
    }
}

/// One row per solution: decoded hyperparameters and raw objectives.
pub fn write_solutions_csv(solutions: &[Solution], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "n_f,n_l,d,r,p,eta,utility_loss,cost,leakage")?;
    for s in solutions {
        let c = &s.config;
        let p = c.purity_threshold.map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            c.n_f,
            c.n_l,
            c.max_depth,
            c.subsample,
            p,
            c.learning_rate,
            s.objectives.utility_loss,
            s.objectives.cost,
            s.objectives.leakage
        )?;
    }
    f.flush()?;
    Ok(())
}

/// Runs the constrained search over `space` with `evaluator` as the
/// objective function. `z` defaults to `(1, cost_ceiling, 1)`.
pub fn cmosb_run(
    ga: &GaConfig,
    constraints: &Constraints,
    evaluator: &Evaluator,
    space: SearchSpace,
    z: Option<[f64; 3]>,
) -> Result<CmosbResult> {
    let z = z.unwrap_or([1.0, evaluator.context().cost_ceiling, 1.0]);
    let problem = CmosbProblem { evaluator, space };
    let run = nsga2_run(&problem, ga, constraints, &z)?;
    Ok(to_result(&run, space, evaluator.trainings()))
}

fn to_result(run: &RunResult, space: SearchSpace, trainings: usize) -> CmosbResult {
    let archive: Vec<Solution> = run
        .archive
        .iter()
        .map(|e| Solution {
            generation: e.generation,
            config: space.decode(&e.genome),
            objectives: ObjectiveVector::from_slice(&e.objectives),
        })
        .collect();
    let mut front: Vec<Solution> = Vec::new();
    for ind in &run.front {
        let config = space.decode(&ind.genome);
        if front.iter().any(|s| s.config == config) {
            continue;
        }
        let generation = run
            .archive
            .iter()
            .find(|e| e.genome == ind.genome)
            .map_or(0, |e| e.generation);
        front.push(Solution {
            generation,
            config,
            objectives: ObjectiveVector::from_slice(&ind.raw),
        });
    }
    CmosbResult {
        schema_version: FRONT_SCHEMA_VERSION.into(),
        reference: run.reference.clone(),
        front,
        evaluations: archive.len(),
        archive,
        hv_trace: run.hv_trace.clone(),
        trainings,
    }
}
