//! Global SEMO, DEMO and the Diverse Population-Based EA over the fitness
//! `(Cost, 2*LP)`.

pub mod archive;
pub mod fitness;
pub mod mutation;
pub mod rng;
pub mod run;

pub use archive::{Archive, Discipline, Individual};
pub use fitness::{box_index, dominates_strong, dominates_weak, BoxIndex, Fitness};
pub use mutation::{alternative_mutation, standard_mutation};
pub use rng::{trial_seed, RngStream};
pub use run::{
    archive_bound, run, run_observed, Algorithm, ArchiveBound, EvoError, IterationRecord, Milestones, RunOptions,
    RunTrace, Target, Termination,
};
