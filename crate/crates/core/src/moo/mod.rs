//! Constrained NSGA-II: mixed binary/real genomes, variation operators,
//! non-dominated sorting, crowding, penalties and exact hypervolume.

mod cmosb;
mod genome;
mod hypervolume;
mod nsga2;
mod operators;
mod pareto;

pub use cmosb::{cmosb_run, write_solutions_csv, CmosbProblem, CmosbResult, Solution, FRONT_SCHEMA_VERSION};
pub use genome::{affine, Genome, GenomeLayout, SearchSpace, DEPTH_BITS, N_F_BITS, N_L_BITS};
pub use hypervolume::{hypervolume, normalized_hypervolume};
pub use nsga2::{nsga2_run, ArchiveEntry, Bound, Constraints, GaConfig, Individual, Problem, RunResult, TwoParabolas};
pub use operators::{bit_flip, polynomial_mutation, sbx, sbx_beta, sbx_pair, single_point_crossover};
pub use pareto::{crowding_distance, dominates, fast_non_dominated_sort, non_dominated, ranks};
