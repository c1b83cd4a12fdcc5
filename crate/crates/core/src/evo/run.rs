//! The steady-state loop shared by all four algorithms.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::archive::{Archive, Discipline, Individual};
use super::fitness::{box_grid_side, Fitness};
use super::mutation::{alternative_mutation, standard_mutation};
use super::rng::RngStream;
use crate::graph::{Genotype, WeightedGraph};
use crate::lp::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Global SEMO with standard bit mutation.
    Gsemo,
    /// Global SEMO with the alternative mutation operator.
    GsemoAlt,
    /// Global SEMO over ε-boxes.
    Demo,
    /// Diverse Population-Based EA.
    Dpbea,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Gsemo, Algorithm::GsemoAlt, Algorithm::Demo, Algorithm::Dpbea];

    pub fn discipline(self) -> Discipline {
        match self {
            Algorithm::Gsemo | Algorithm::GsemoAlt => Discipline::Semo,
            Algorithm::Demo => Discipline::Demo,
            Algorithm::Dpbea => Discipline::Dpbea,
        }
    }

    pub fn uses_alternative_mutation(self) -> bool {
        matches!(self, Algorithm::GsemoAlt | Algorithm::Dpbea)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gsemo => "gsemo",
            Algorithm::GsemoAlt => "gsemo-alt",
            Algorithm::Demo => "demo",
            Algorithm::Dpbea => "dpbea",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = EvoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| EvoError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvoError {
    #[error("termination needs an iteration budget or a target")]
    NoTermination,
    #[error("target ratio must be >= 1, got {0}")]
    BadRatio(f64),
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Any vertex cover.
    AnyCover,
    /// A cover of cost at most `ratio * opt`.
    Ratio { ratio: f64, opt: u64 },
}

impl Target {
    pub fn accepts(&self, cover_cost: u64) -> bool {
        match *self {
            Target::AnyCover => true,
            Target::Ratio { ratio, opt } => within_ratio(cover_cost, opt, ratio),
        }
    }
}

/// `cost <= ratio * opt`, with a relative slack of 1e-12 for ratios such as
/// 1.1 that are not exact in binary.
pub fn within_ratio(cost: u64, opt: u64, ratio: f64) -> bool {
    cost as f64 <= ratio * opt as f64 * (1.0 + 1e-12)
}

/// A run stops when the budget is spent, or when every requested milestone
/// (the target, plus `0^n` entering the archive if `await_zero_string`) has
/// been reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Termination {
    pub budget: Option<u64>,
    pub target: Option<Target>,
    pub await_zero_string: bool,
}

impl Termination {
    pub fn budget(budget: u64) -> Self {
        Self { budget: Some(budget), target: None, await_zero_string: false }
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = Some(target);
        self
    }

    pub fn awaiting_zero_string(mut self) -> Self {
        self.await_zero_string = true;
        self
    }

    fn validate(&self) -> Result<(), EvoError> {
        if self.budget.is_none() && self.target.is_none() {
            return Err(EvoError::NoTermination);
        }
        if let Some(Target::Ratio { ratio, .. }) = self.target {
            if ratio.is_nan() || ratio < 1.0 {
                return Err(EvoError::BadRatio(ratio));
            }
        }
        Ok(())
    }
}

/// Upper bound on the archive size that the discipline guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveBound {
    pub max_size: u64,
}

/// `2*OPT + 1` for Global SEMO (needs OPT), `2k - 1` with
/// `k = 1 + ceil(log_{1+d}(1 + n*W_max))` for DEMO, `2(n+1)` for the
/// Diverse Population-Based EA.
pub fn archive_bound(algorithm: Algorithm, g: &WeightedGraph, opt: Option<u64>) -> Option<ArchiveBound> {
    let max_size = match algorithm.discipline() {
        Discipline::Semo => 2 * opt? + 1,
        Discipline::Demo => 2 * box_grid_side(g.n(), g.max_weight()) - 1,
        Discipline::Dpbea => 2 * (g.n() as u64 + 1),
    };
    Some(ArchiveBound { max_size })
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Keep one [`IterationRecord`] per iteration in the trace.
    pub record_history: bool,
    /// Check the archive size bound and structure after every iteration.
    pub bound: Option<ArchiveBound>,
    pub check_structure: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub archive_size: usize,
    pub best_cover_cost: Option<u64>,
}

/// Iteration at which each milestone was first reached; iteration 0 is the
/// initial individual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Milestones {
    pub zero_string: Option<u64>,
    pub first_cover: Option<u64>,
    pub target: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub iterations: u64,
    pub milestones: Milestones,
    pub max_archive: usize,
    pub best_cover_cost: Option<u64>,
    pub best_cover: Option<String>,
    pub final_archive_size: usize,
    pub bound_violations: u64,
    pub evaluations: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub history: Vec<IterationRecord>,
}

/// Fitness evaluation memoized on the genotype for the lifetime of a run.
pub struct Evaluator<'g> {
    g: &'g WeightedGraph,
    lp_cache: HashMap<Genotype, u64>,
    evaluations: u64,
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g WeightedGraph) -> Self {
        Self { g, lp_cache: HashMap::new(), evaluations: 0 }
    }

    pub fn fitness(&mut self, x: &Genotype) -> Fitness {
        let cost = x.ones().map(|i| self.g.weight(i)).sum();
        let lp2 = match self.lp_cache.get(x) {
            Some(&v) => v,
            None => {
                self.evaluations += 1;
                let rg = self.g.residual(x).expect("genotype length matches graph");
                let v = solve_lp(&rg).value2;
                self.lp_cache.insert(x.clone(), v);
                v
            }
        };
        Fitness::new(cost, lp2)
    }

    /// Number of distinct genotypes whose LP was solved.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

pub fn run(
    algorithm: Algorithm,
    g: &WeightedGraph,
    rng: &mut RngStream,
    termination: &Termination,
    options: &RunOptions,
) -> Result<RunTrace, EvoError> {
    run_observed(algorithm, g, rng, termination, options, |_, _| {})
}

/// [`run`] with a callback invoked after initialization and after every
/// iteration.
pub fn run_observed(
    algorithm: Algorithm,
    g: &WeightedGraph,
    rng: &mut RngStream,
    termination: &Termination,
    options: &RunOptions,
    mut observer: impl FnMut(&IterationRecord, &Archive),
) -> Result<RunTrace, EvoError> {
    termination.validate()?;
    let n = g.n();
    let discipline = algorithm.discipline();
    let mut eval = Evaluator::new(g);
    let mut archive = Archive::new(discipline);

    let make = |x: Genotype, eval: &mut Evaluator| -> Individual {
        let fit = eval.fitness(&x);
        let ind = Individual::new(x, fit);
        if discipline == Discipline::Demo { ind.boxed() } else { ind }
    };

    let mut trace = RunTrace {
        algorithm,
        seed: rng.seed(),
        iterations: 0,
        milestones: Milestones::default(),
        max_archive: 0,
        best_cover_cost: None,
        best_cover: None,
        final_archive_size: 0,
        bound_violations: 0,
        evaluations: 0,
        history: Vec::new(),
    };

    let init = Genotype::from_bits((0..n).map(|_| rng.gen::<bool>()).collect());
    let first = make(init, &mut eval);
    let mut accepted = Some(first.clone());
    archive.insert(first);

    let mut iteration = 0u64;
    loop {
        if let Some(ind) = accepted.take() {
            note_accepted(&mut trace, &ind, iteration, termination.target);
        }
        trace.max_archive = trace.max_archive.max(archive.len());
        let within_bound = options.bound.is_none_or(|b| archive.len() as u64 <= b.max_size);
        let structure_ok = !options.check_structure || archive.check_structure().is_ok();
        if !within_bound || !structure_ok {
            trace.bound_violations += 1;
        }
        let record = IterationRecord {
            iteration,
            archive_size: archive.len(),
            best_cover_cost: trace.best_cover_cost,
        };
        observer(&record, &archive);
        if options.record_history {
            trace.history.push(record);
        }

        if done(&trace.milestones, termination) || termination.budget.is_some_and(|b| iteration >= b) {
            break;
        }

        iteration += 1;
        let parent = &archive.members()[rng.gen_range(0..archive.len())].genotype;
        let child = if algorithm.uses_alternative_mutation() {
            alternative_mutation(g, parent, rng)
        } else {
            standard_mutation(parent, rng)
        };
        let cand = make(child, &mut eval);
        if archive.insert(cand.clone()) {
            accepted = Some(cand);
        }
    }

    trace.iterations = iteration;
    trace.final_archive_size = archive.len();
    trace.evaluations = eval.evaluations();
    Ok(trace)
}

fn note_accepted(trace: &mut RunTrace, ind: &Individual, iteration: u64, target: Option<Target>) {
    let m = &mut trace.milestones;
    if m.zero_string.is_none() && ind.genotype.is_zero() {
        m.zero_string = Some(iteration);
    }
    if !ind.fitness.is_cover() {
        return;
    }
    if m.first_cover.is_none() {
        m.first_cover = Some(iteration);
    }
    if trace.best_cover_cost.is_none_or(|c| ind.fitness.cost < c) {
        trace.best_cover_cost = Some(ind.fitness.cost);
        trace.best_cover = Some(ind.genotype.to_string());
    }
    if m.target.is_none() && target.is_some_and(|t| t.accepts(ind.fitness.cost)) {
        m.target = Some(iteration);
    }
}

fn done(m: &Milestones, termination: &Termination) -> bool {
    let Some(_) = termination.target else {
        return false;
    };
    m.target.is_some() && (!termination.await_zero_string || m.zero_string.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::opt_exhaustive;
    use crate::graph::{gen_instance, InstanceKind};

    fn checked(algorithm: Algorithm, g: &WeightedGraph, opt: u64) -> RunOptions {
        RunOptions { record_history: false, bound: archive_bound(algorithm, g, Some(opt)), check_structure: true }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("nsga2".parse::<Algorithm>().is_err());
    }

    #[test]
    fn termination_must_be_specified() {
        let g = WeightedGraph::new(2, &[1, 1], &[(0, 1)]).unwrap();
        let t = Termination { budget: None, target: None, await_zero_string: false };
        let err = run(Algorithm::Gsemo, &g, &mut RngStream::new(0), &t, &RunOptions::default());
        assert_eq!(err.unwrap_err(), EvoError::NoTermination);
        let t = Termination::budget(5).with_target(Target::Ratio { ratio: 0.5, opt: 1 });
        assert!(run(Algorithm::Gsemo, &g, &mut RngStream::new(0), &t, &RunOptions::default()).is_err());
    }

    #[test]
    fn edgeless_graph_hits_optimum_with_zero_string() {
        let g = WeightedGraph::new(5, &[3, 1, 4, 1, 5], &[]).unwrap();
        for a in Algorithm::ALL {
            let t = Termination::budget(100_000).with_target(Target::Ratio { ratio: 1.0, opt: 0 });
            let tr = run(a, &g, &mut RngStream::new(3), &t, &RunOptions::default()).unwrap();
            let zero = tr.milestones.zero_string.expect("0^n reached");
            assert!(tr.milestones.target.unwrap() <= zero);
            assert_eq!(tr.best_cover_cost, Some(0));
        }
    }

    #[test]
    fn single_edge_gsemo_finds_optimum_for_all_seeds() {
        let g = WeightedGraph::new(2, &[1, 1], &[(0, 1)]).unwrap();
        for seed in 0..100 {
            let t = Termination::budget(10_000).with_target(Target::Ratio { ratio: 1.0, opt: 1 });
            let tr = run(Algorithm::Gsemo, &g, &mut RngStream::new(seed), &t, &RunOptions::default()).unwrap();
            assert_eq!(tr.best_cover_cost, Some(1), "seed {seed}");
        }
    }

    #[test]
    fn fixed_seed_gives_identical_trace() {
        let g = gen_instance(InstanceKind::Gnp { n: 10, p: 0.4 }, 8, 2).unwrap();
        for a in Algorithm::ALL {
            let t = Termination::budget(2_000);
            let opts = RunOptions { record_history: true, ..RunOptions::default() };
            let x = run(a, &g, &mut RngStream::new(77), &t, &opts).unwrap();
            let y = run(a, &g, &mut RngStream::new(77), &t, &opts).unwrap();
            assert_eq!(x, y);
            assert_eq!(x.history.len(), 2_001);
        }
    }

    #[test]
    fn budget_zero_only_initializes() {
        let g = gen_instance(InstanceKind::Gnp { n: 10, p: 0.5 }, 8, 2).unwrap();
        let tr = run(Algorithm::Gsemo, &g, &mut RngStream::new(1), &Termination::budget(0), &RunOptions::default())
            .unwrap();
        assert_eq!(tr.iterations, 0);
        assert_eq!(tr.final_archive_size, 1);
    }

    #[test]
    fn bounds_hold_on_random_instances() {
        for seed in 0..6 {
            let g = gen_instance(InstanceKind::Gnp { n: 9, p: 0.4 }, 12, seed).unwrap();
            let opt = opt_exhaustive(&g).unwrap().opt_cost;
            for a in Algorithm::ALL {
                let opts = checked(a, &g, opt);
                let tr = run(a, &g, &mut RngStream::new(seed), &Termination::budget(3_000), &opts).unwrap();
                assert_eq!(tr.bound_violations, 0, "{a} seed {seed}");
            }
        }
    }

    #[test]
    fn stored_fitness_is_honest() {
        let g = gen_instance(InstanceKind::Gnp { n: 10, p: 0.3 }, 16, 5).unwrap();
        for a in Algorithm::ALL {
            let mut failures = 0;
            run_observed(a, &g, &mut RngStream::new(9), &Termination::budget(1_000), &RunOptions::default(), |_, arch| {
                for m in arch.members() {
                    let cost = g.cost(&m.genotype).unwrap();
                    let lp2 = crate::lp::lp_value2(&g, &m.genotype).unwrap();
                    if m.fitness != Fitness::new(cost, lp2) || m.ones != m.genotype.count_ones() {
                        failures += 1;
                    }
                }
            })
            .unwrap();
            assert_eq!(failures, 0);
        }
    }

    #[test]
    fn semo_constrained_min_lp_never_increases() {
        for seed in 0..5 {
            let g = gen_instance(InstanceKind::Gnp { n: 10, p: 0.4 }, 10, 40 + seed).unwrap();
            let opt = opt_exhaustive(&g).unwrap().opt_cost;
            let mut prev: Option<u64> = None;
            run_observed(Algorithm::Gsemo, &g, &mut RngStream::new(seed), &Termination::budget(5_000), &RunOptions::default(), |_, arch| {
                let cur = arch
                    .members()
                    .iter()
                    .filter(|m| m.fitness.cost_plus_two_lp() <= 2 * opt)
                    .map(|m| m.fitness.lp2)
                    .min();
                if let (Some(p), Some(c)) = (prev, cur) {
                    assert!(c <= p);
                }
                if prev.is_some() {
                    assert!(cur.is_some());
                }
                prev = cur.or(prev);
            })
            .unwrap();
        }
    }
}
