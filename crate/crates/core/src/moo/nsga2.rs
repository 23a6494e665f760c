use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::genome::{Genome, GenomeLayout};
use super::hypervolume::normalized_hypervolume;
use super::operators::{bit_flip, polynomial_mutation, sbx, single_point_crossover};
use super::pareto::{crowding_distance, fast_non_dominated_sort, non_dominated};
use crate::error::{Error, Result};
use crate::rng::{rng_from, tags};

/// Genetic algorithm settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_binary: f64,
    pub crossover_sbx: f64,
    pub mutation_bitflip: f64,
    pub mutation_poly: f64,
    pub eta_c: f64,
    pub eta_m: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 20,
            generations: 40,
            crossover_binary: 0.9,
            crossover_sbx: 0.9,
            mutation_bitflip: 0.1,
            mutation_poly: 0.1,
            eta_c: 2.0,
            eta_m: 20.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || !self.population.is_multiple_of(2) {
            return Err(Error::param("population", "must be even and at least 2"));
        }
        for (name, p) in [
            ("crossover_binary", self.crossover_binary),
            ("crossover_sbx", self.crossover_sbx),
            ("mutation_bitflip", self.mutation_bitflip),
            ("mutation_poly", self.mutation_poly),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, "must be a probability in [0, 1]"));
            }
        }
        if !(self.eta_c >= 0.0 && self.eta_m >= 0.0) {
            return Err(Error::param("eta_c/eta_m", "distribution indices must be non-negative"));
        }
        Ok(())
    }
}

/// Upper bound `φ` on one objective with penalty coefficient `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub objective: usize,
    pub phi: f64,
    pub alpha: f64,
}

/// Penalized bounds; an empty list is the unconstrained search.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub bounds: Vec<Bound>,
}

impl Constraints {
    pub fn none() -> Self {
        Self::default()
    }

    /// Cost bound `φ_c` (objective 1) and privacy bound `φ_p` (objective 2)
    /// sharing the coefficient `α`.
    pub fn cost_and_privacy(phi_c: f64, phi_p: f64, alpha: f64) -> Self {
        Self {
            bounds: vec![
                Bound {
                    objective: 1,
                    phi: phi_c,
                    alpha,
                },
                Bound {
                    objective: 2,
                    phi: phi_p,
                    alpha,
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for b in &self.bounds {
            if !(b.phi >= 0.0 && b.alpha >= 0.0) {
                return Err(Error::param(
                    "constraints",
                    "bounds and coefficients must be non-negative",
                ));
            }
        }
        Ok(())
    }

    /// `ε + α·max(0, ε − φ)` on each bounded objective.
    pub fn penalize(&self, raw: &[f64]) -> Vec<f64> {
        let mut out = raw.to_vec();
        for b in &self.bounds {
            let e = raw[b.objective];
            out[b.objective] = e + b.alpha * (e - b.phi).max(0.0);
        }
        out
    }
}

/// Objective function over genomes. Must be total: failures map to a
/// worst-case vector.
pub trait Problem: Sync {
    fn layout(&self) -> GenomeLayout;
    fn evaluate(&self, genome: &Genome) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Genome,
    pub raw: Vec<f64>,
    pub penalized: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

/// One evaluation, tagged with the generation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub generation: usize,
    pub genome: Genome,
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub population: Vec<Individual>,
    /// Non-dominated members of the final population by raw objectives,
    /// one per distinct genome.
    pub front: Vec<Individual>,
    pub archive: Vec<ArchiveEntry>,
    /// Normalized archive-front hypervolume after each generation `0..=T`.
    pub hv_trace: Vec<f64>,
    pub reference: Vec<f64>,
}

impl RunResult {
    /// Indices of archive entries on the non-dominated front of every
    /// evaluation up to and including `generation`.
    pub fn archive_front(&self, generation: usize) -> Vec<usize> {
        let idx: Vec<usize> = (0..self.archive.len())
            .filter(|&i| self.archive[i].generation <= generation)
            .collect();
        let pts: Vec<Vec<f64>> = idx.iter().map(|&i| self.archive[i].objectives.clone()).collect();
        non_dominated(&pts).into_iter().map(|k| idx[k]).collect()
    }

    /// Normalized hypervolume of the archive up to `generation` against `z`.
    pub fn archive_hv(&self, generation: usize, z: &[f64]) -> f64 {
        let pts: Vec<Vec<f64>> = self
            .archive
            .iter()
            .filter(|e| e.generation <= generation)
            .map(|e| e.objectives.clone())
            .collect();
        normalized_hypervolume(&pts, z)
    }
}

/// Binary tournament on (rank, crowding); ties keep the first draw.
fn tournament(pop: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.random_range(0..pop.len());
    let b = rng.random_range(0..pop.len());
    let (x, y) = (&pop[a], &pop[b]);
    if y.rank < x.rank || (y.rank == x.rank && y.crowding > x.crowding) {
        b
    } else {
        a
    }
}

fn variation(parents: Vec<Genome>, ga: &GaConfig, rng: &mut ChaCha8Rng) -> Vec<Genome> {
    let mut out = Vec::with_capacity(parents.len());
    let mut it = parents.into_iter();
    while let (Some(mut a), Some(mut b)) = (it.next(), it.next()) {
        if rng.random::<f64>() < ga.crossover_binary {
            single_point_crossover(&mut a, &mut b, rng);
        }
        sbx(&mut a, &mut b, ga.crossover_sbx, ga.eta_c, rng);
        for child in [&mut a, &mut b] {
            if rng.random::<f64>() < ga.mutation_bitflip && !child.bits.is_empty() {
                let rate = 1.0 / child.bits.len() as f64;
                bit_flip(child, rate, rng);
            }
            polynomial_mutation(child, ga.mutation_poly, ga.eta_m, rng);
        }
        out.push(a);
        out.push(b);
    }
    out
}

/// Evaluates concurrently on the current rayon pool; results come back in
/// genome order.
fn evaluate_all<P: Problem>(problem: &P, genomes: &[Genome]) -> Vec<Vec<f64>> {
    genomes.par_iter().map(|g| problem.evaluate(g)).collect()
}

/// Ranks by penalized objectives and keeps the best `n`: whole fronts
/// first, then the last front by descending crowding (index breaks ties).
fn select(mut pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let pts: Vec<Vec<f64>> = pool.iter().map(|i| i.penalized.clone()).collect();
    let fronts = fast_non_dominated_sort(&pts);
    let mut keep = Vec::with_capacity(n);
    for (rank, front) in fronts.iter().enumerate() {
        let dist = crowding_distance(&pts, front);
        for (k, &i) in front.iter().enumerate() {
            pool[i].rank = rank;
            pool[i].crowding = dist[k];
        }
        if keep.len() + front.len() <= n {
            keep.extend_from_slice(front);
        } else {
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(front[a].cmp(&front[b])));
            keep.extend(order.into_iter().take(n - keep.len()).map(|k| front[k]));
        }
        if keep.len() == n {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| slots[i].take().expect("selected once"))
        .collect()
}

fn individuals(genomes: Vec<Genome>, raw: Vec<Vec<f64>>, constraints: &Constraints) -> Vec<Individual> {
    genomes
        .into_iter()
        .zip(raw)
        .map(|(genome, raw)| Individual {
            penalized: constraints.penalize(&raw),
            genome,
            raw,
            rank: 0,
            crowding: 0.0,
        })
        .collect()
}

/// Constrained NSGA-II. `z` is the reference point of the hypervolume trace;
/// objectives are divided by `z` before measuring.
pub fn nsga2_run<P: Problem>(problem: &P, ga: &GaConfig, constraints: &Constraints, z: &[f64]) -> Result<RunResult> {
    ga.validate()?;
    constraints.validate()?;
    let layout = problem.layout();
    let mut rng = rng_from(ga.seed, tags::GA);
    let n = ga.population;

    let genomes: Vec<Genome> = (0..n).map(|_| Genome::random(layout, &mut rng)).collect();
    let raw = evaluate_all(problem, &genomes);
    let mut archive: Vec<ArchiveEntry> = genomes
        .iter()
        .zip(&raw)
        .map(|(g, o)| ArchiveEntry {
            generation: 0,
            genome: g.clone(),
            objectives: o.clone(),
        })
        .collect();
    let mut population = select(individuals(genomes, raw, constraints), n);
    let mut hv_trace = vec![archive_hv(&archive, z)];

    for generation in 1..=ga.generations {
        let parents: Vec<Genome> = (0..n)
            .map(|_| population[tournament(&population, &mut rng)].genome.clone())
            .collect();
        let offspring = variation(parents, ga, &mut rng);
        let raw = evaluate_all(problem, &offspring);
        archive.extend(offspring.iter().zip(&raw).map(|(g, o)| ArchiveEntry {
            generation,
            genome: g.clone(),
            objectives: o.clone(),
        }));
        let mut pool = population;
        pool.extend(individuals(offspring, raw, constraints));
        population = select(pool, n);
        hv_trace.push(archive_hv(&archive, z));
    }

    let pts: Vec<Vec<f64>> = population.iter().map(|i| i.raw.clone()).collect();
    let mut front: Vec<Individual> = Vec::new();
    for i in non_dominated(&pts) {
        if !front.iter().any(|f| f.genome == population[i].genome) {
            front.push(population[i].clone());
        }
    }
    Ok(RunResult {
        population,
        front,
        archive,
        hv_trace,
        reference: z.to_vec(),
    })
}

fn archive_hv(archive: &[ArchiveEntry], z: &[f64]) -> f64 {
    let pts: Vec<Vec<f64>> = archive.iter().map(|e| e.objectives.clone()).collect();
    normalized_hypervolume(&pts, z)
}

/// Minimize `(x², (x − 2)²)` for `x = −2 + 6·gene` over one real gene.
#[derive(Debug, Clone, Copy, Default)]
pub struct TwoParabolas;

impl TwoParabolas {
    /// Reference point of the analytic check.
    pub const REFERENCE: [f64; 2] = [4.0, 4.0];

    /// Exact hypervolume of the Pareto front `f₂ = (√f₁ − 2)²`, `f₁ ∈ [0, 4]`,
    /// against [`Self::REFERENCE`]: `16 − 8/3 = 40/3`.
    pub const OPTIMAL_HV: f64 = 40.0 / 3.0;

    pub fn decode(gene: f64) -> f64 {
        -2.0 + 6.0 * gene
    }
}

impl Problem for TwoParabolas {
    fn layout(&self) -> GenomeLayout {
        GenomeLayout { bits: 0, reals: 1 }
    }

    fn evaluate(&self, genome: &Genome) -> Vec<f64> {
        let x = Self::decode(genome.reals[0]);
        vec![x * x, (x - 2.0) * (x - 2.0)]
    }
}
