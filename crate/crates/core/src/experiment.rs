//! Single runs and batches of independent trials, with CSV rows and a JSON
//! summary per batch.

use std::fmt;
use std::io;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evo::{
    archive_bound, run, trial_seed, Algorithm, ArchiveBound, EvoError, RngStream, RunOptions, RunTrace, Target,
    Termination,
};
use crate::exact::{opt_branch_bound, ExactError, ExactResult};
use crate::graph::{Genotype, GraphError, WeightedGraph};
use crate::lp::solve_lp;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Evo(#[from] EvoError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot compute OPT: {0}")]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub trials: u64,
    pub seed_base: u64,
    pub budget: Option<u64>,
    /// Stop once a cover with cost `<= ratio * OPT` is in the archive.
    pub target_ratio: Option<f64>,
    /// Records a `(1 + ε)` target; used as the target when no ratio is given.
    pub epsilon: Option<f64>,
    /// Known OPT; computed by branch-and-bound when absent and needed.
    pub opt: Option<u64>,
    pub check_bounds: bool,
    /// Keep running after the target until `0^n` is in the archive.
    pub await_zero_string: bool,
    /// Run trials on the rayon pool (only with the `parallel` feature).
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            trials: 1,
            seed_base: 0,
            budget: None,
            target_ratio: None,
            epsilon: None,
            opt: None,
            check_bounds: false,
            await_zero_string: false,
            parallel: cfg!(feature = "parallel"),
        }
    }

    pub fn effective_ratio(&self) -> Option<f64> {
        self.target_ratio.or(self.epsilon.map(|e| 1.0 + e))
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be >= 1".into()));
        }
        if let Some(e) = self.epsilon {
            if e.is_nan() || e < 0.0 {
                return Err(ExperimentError::Config(format!("epsilon must be >= 0, got {e}")));
            }
        }
        if let Some(r) = self.target_ratio {
            if r.is_nan() || r < 1.0 {
                return Err(ExperimentError::Config(format!("target ratio must be >= 1, got {r}")));
            }
        }
        Ok(())
    }
}

/// OPT is computed for reporting, even when no target needs it, up to this
/// many vertices.
pub const OPPORTUNISTIC_OPT_LIMIT: usize = 32;

/// Instance context shared by every trial of a batch.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub opt: Option<u64>,
    pub termination: Termination,
    pub options: RunOptions,
}

/// Validates `config` and resolves OPT, the target and the bound checks.
pub fn prepare(config: &ExperimentConfig, g: &WeightedGraph) -> Result<Prepared, ExperimentError> {
    config.validate()?;
    let ratio = config.effective_ratio();
    let needs_opt = ratio.is_some() || config.check_bounds;
    let opt = match config.opt {
        Some(o) => Some(o),
        None if needs_opt || g.n() <= OPPORTUNISTIC_OPT_LIMIT => match opt_branch_bound(g) {
            Ok(ExactResult { opt_cost, .. }) => Some(opt_cost),
            Err(e) if needs_opt => return Err(e.into()),
            Err(_) => None,
        },
        None => None,
    };
    let target = match ratio {
        Some(ratio) => Target::Ratio { ratio, opt: opt.expect("OPT resolved above") },
        None => Target::AnyCover,
    };
    let termination = Termination { budget: config.budget, target: Some(target), await_zero_string: config.await_zero_string };
    let options = RunOptions {
        record_history: false,
        bound: if config.check_bounds { archive_bound(config.algorithm, g, opt) } else { None },
        check_structure: config.check_bounds,
    };
    Ok(Prepared { config: config.clone(), opt, termination, options })
}

/// One CSV row. Missing hitting times mean the milestone was not reached
/// within the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub iters_to_zero_string: Option<u64>,
    pub iters_to_cover: Option<u64>,
    pub iters_to_target: Option<u64>,
    pub max_archive: u64,
    pub best_cost: Option<u64>,
    pub opt: Option<u64>,
    pub ratio: Option<f64>,
    pub censored: bool,
}

/// `best / opt`, with `0 / 0` read as 1.
pub fn approximation_ratio(best: u64, opt: u64) -> f64 {
    if opt == 0 {
        if best == 0 { 1.0 } else { f64::INFINITY }
    } else {
        best as f64 / opt as f64
    }
}

impl TrialRecord {
    pub fn from_trace(trace: &RunTrace, opt: Option<u64>) -> Self {
        let ratio = match (trace.best_cover_cost, opt) {
            (Some(best), Some(opt)) => Some(approximation_ratio(best, opt)),
            _ => None,
        };
        Self {
            seed: trace.seed,
            iters_to_zero_string: trace.milestones.zero_string,
            iters_to_cover: trace.milestones.first_cover,
            iters_to_target: trace.milestones.target,
            max_archive: trace.max_archive as u64,
            best_cost: trace.best_cover_cost,
            opt,
            ratio,
            censored: trace.milestones.target.is_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub n: usize,
    pub m: usize,
    pub w_max: u64,
}

impl InstanceInfo {
    pub fn of(g: &WeightedGraph) -> Self {
        Self { n: g.n(), m: g.m(), w_max: g.max_weight() }
    }
}

/// Everything `run` reports for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub instance: InstanceInfo,
    pub budget: Option<u64>,
    pub target_ratio: Option<f64>,
    pub epsilon: Option<f64>,
    pub archive_bound: Option<ArchiveBound>,
    pub record: TrialRecord,
    pub trace: RunTrace,
}

impl RunReport {
    pub fn target_met(&self) -> bool {
        !self.record.censored
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt_or = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
        let r = &self.record;
        writeln!(f, "algorithm        {}", self.algorithm)?;
        writeln!(f, "instance         n={} m={} w_max={}", self.instance.n, self.instance.m, self.instance.w_max)?;
        writeln!(f, "seed             {}", r.seed)?;
        writeln!(f, "iterations       {}", self.trace.iterations)?;
        writeln!(f, "0^n in archive   {}", opt_or(r.iters_to_zero_string))?;
        writeln!(f, "first cover      {}", opt_or(r.iters_to_cover))?;
        writeln!(f, "target reached   {}", opt_or(r.iters_to_target))?;
        writeln!(f, "max archive      {}", r.max_archive)?;
        writeln!(f, "best cover cost  {}", opt_or(r.best_cost))?;
        writeln!(f, "OPT              {}", opt_or(r.opt))?;
        writeln!(f, "ratio            {}", r.ratio.map_or("-".to_string(), |x| format!("{x:.4}")))?;
        if self.archive_bound.is_some() {
            writeln!(f, "bound violations {}", self.trace.bound_violations)?;
        }
        write!(f, "status           {}", if r.censored { "censored" } else { "target met" })
    }
}

pub fn run_trial(prepared: &Prepared, g: &WeightedGraph, index: u64) -> Result<RunTrace, ExperimentError> {
    let seed = trial_seed(prepared.config.seed_base, index);
    let mut rng = RngStream::new(seed);
    Ok(run(prepared.config.algorithm, g, &mut rng, &prepared.termination, &prepared.options)?)
}

/// A single trial with seed `config.seed_base`.
pub fn run_single(config: &ExperimentConfig, g: &WeightedGraph) -> Result<RunReport, ExperimentError> {
    let prepared = prepare(config, g)?;
    let trace = run_trial(&prepared, g, 0)?;
    Ok(RunReport {
        algorithm: config.algorithm,
        instance: InstanceInfo::of(g),
        budget: config.budget,
        target_ratio: config.target_ratio,
        epsilon: config.epsilon,
        archive_bound: prepared.options.bound,
        record: TrialRecord::from_trace(&trace, prepared.opt),
        trace,
    })
}

/// Nearest-rank quantiles over the trials that reached a milestone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingStats {
    pub hits: u64,
    pub mean: Option<f64>,
    pub q25: Option<u64>,
    pub median: Option<u64>,
    pub q75: Option<u64>,
    pub q90: Option<u64>,
    pub max: Option<u64>,
}

fn nearest_rank(sorted: &[u64], q: f64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

pub fn hitting_stats(values: impl IntoIterator<Item = Option<u64>>) -> HittingStats {
    let mut hits: Vec<u64> = values.into_iter().flatten().collect();
    hits.sort_unstable();
    let mean = (!hits.is_empty()).then(|| hits.iter().map(|&h| h as f64).sum::<f64>() / hits.len() as f64);
    HittingStats {
        hits: hits.len() as u64,
        mean,
        q25: nearest_rank(&hits, 0.25),
        median: nearest_rank(&hits, 0.5),
        q75: nearest_rank(&hits, 0.75),
        q90: nearest_rank(&hits, 0.9),
        max: hits.last().copied(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeBound {
    pub expression: String,
    pub value: f64,
}

/// The asymptotic expected-time bound for `algorithm`, with every hidden
/// constant set to 1 and logarithms in base 2. A reference magnitude only.
pub fn runtime_bound(algorithm: Algorithm, g: &WeightedGraph, opt: Option<u64>, epsilon: Option<f64>) -> Option<RuntimeBound> {
    let n = g.n() as f64;
    let log_w = (g.max_weight() as f64).log2();
    let log_n = n.log2();
    let exp_term = |opt: f64| {
        let eps = epsilon.unwrap_or(0.0);
        2f64.powf(n.min((2.0 * (1.0 - eps) * opt).max(0.0)))
    };
    let (expression, value) = match algorithm {
        Algorithm::Gsemo => {
            let opt = opt? as f64;
            ("OPT*n*(log W_max + log n)", opt * n * (log_w + log_n))
        }
        Algorithm::GsemoAlt => {
            let opt = opt? as f64;
            (
                "OPT*2^min(n, 2(1-eps)OPT) + OPT*n*(log W_max + log n + OPT)",
                opt * exp_term(opt) + opt * n * (log_w + log_n + opt),
            )
        }
        Algorithm::Demo => ("n^3*(log n + log W_max)^2", n.powi(3) * (log_n + log_w).powi(2)),
        Algorithm::Dpbea => {
            let opt = opt? as f64;
            ("n*2^min(n, 2(1-eps)OPT) + n^3", n * exp_term(opt) + n.powi(3))
        }
    };
    Some(RuntimeBound { expression: expression.to_string(), value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub instance: InstanceInfo,
    pub trials: u64,
    pub completed: u64,
    pub interrupted: bool,
    pub seed_base: u64,
    pub budget: Option<u64>,
    pub target_ratio: Option<f64>,
    pub epsilon: Option<f64>,
    pub opt: Option<u64>,
    pub successes: u64,
    pub success_rate: f64,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub bounds_checked: bool,
    pub archive_bound: Option<ArchiveBound>,
    pub bound_violations: u64,
    pub zero_string: HittingStats,
    pub first_cover: HittingStats,
    pub target: HittingStats,
    pub runtime_bound: Option<RuntimeBound>,
}

pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), ExperimentError> {
        write_csv(&self.records, out)
    }

    pub fn summary_json(&self) -> Result<String, ExperimentError> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }

    /// Records and summary in one JSON document.
    pub fn to_json(&self) -> Result<String, ExperimentError> {
        #[derive(Serialize)]
        struct Both<'a> {
            summary: &'a Summary,
            records: &'a [TrialRecord],
        }
        Ok(serde_json::to_string_pretty(&Both { summary: &self.summary, records: &self.records })?)
    }
}

pub fn write_csv<W: io::Write>(records: &[TrialRecord], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<TrialRecord>, ExperimentError> {
    let mut rd = csv::Reader::from_reader(input);
    let rows = rd.deserialize().collect::<Result<Vec<TrialRecord>, _>>()?;
    Ok(rows)
}

type TrialOutcome = Result<Option<(TrialRecord, u64)>, ExperimentError>;

fn run_indexed(
    indices: Vec<u64>,
    parallel: bool,
    f: impl Fn(u64) -> TrialOutcome + Send + Sync,
) -> Vec<TrialOutcome> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return indices.into_par_iter().map(f).collect();
    }
    let _ = parallel;
    indices.into_iter().map(f).collect()
}

/// Runs `config.trials` independent trials. Trials not yet started when
/// `cancel` is raised are skipped; the result then covers the completed ones.
pub fn run_experiment(
    config: &ExperimentConfig,
    g: &WeightedGraph,
    cancel: Option<&AtomicBool>,
) -> Result<ExperimentResult, ExperimentError> {
    let prepared = prepare(config, g)?;
    let outcomes = run_indexed((0..config.trials).collect(), config.parallel, |i| {
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Ok(None);
        }
        let trace = run_trial(&prepared, g, i)?;
        Ok(Some((TrialRecord::from_trace(&trace, prepared.opt), trace.bound_violations)))
    });
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut bound_violations = 0;
    for outcome in outcomes {
        if let Some((record, violations)) = outcome? {
            bound_violations += violations;
            rows.push(record);
        }
    }
    rows.sort_by_key(|r| r.seed);
    let summary = summarize(&prepared, g, &rows, bound_violations);
    Ok(ExperimentResult { records: rows, summary })
}

/// Aggregates rows into a summary. Every statistic except the violation
/// count is a function of the rows alone.
pub fn summarize(prepared: &Prepared, g: &WeightedGraph, rows: &[TrialRecord], bound_violations: u64) -> Summary {
    let config = &prepared.config;
    let completed = rows.len() as u64;
    let successes = rows.iter().filter(|r| !r.censored).count() as u64;
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    let max_ratio = ratios.iter().copied().reduce(f64::max);
    Summary {
        algorithm: config.algorithm,
        instance: InstanceInfo::of(g),
        trials: config.trials,
        completed,
        interrupted: completed < config.trials,
        seed_base: config.seed_base,
        budget: config.budget,
        target_ratio: config.target_ratio,
        epsilon: config.epsilon,
        opt: prepared.opt,
        successes,
        success_rate: if completed == 0 { 0.0 } else { successes as f64 / completed as f64 },
        mean_ratio,
        max_ratio,
        bounds_checked: config.check_bounds,
        archive_bound: prepared.options.bound,
        bound_violations,
        zero_string: hitting_stats(rows.iter().map(|r| r.iters_to_zero_string)),
        first_cover: hitting_stats(rows.iter().map(|r| r.iters_to_cover)),
        target: hitting_stats(rows.iter().map(|r| r.iters_to_target)),
        runtime_bound: runtime_bound(
            config.algorithm,
            g,
            prepared.opt,
            config.epsilon.or(config.target_ratio.map(|r| r - 1.0)),
        ),
    }
}

/// Output of the `lp` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpReport {
    pub selection: String,
    pub value2: u64,
    /// `(vertex, 2*y)` for every unselected vertex.
    pub assignment: Vec<(usize, u8)>,
}

fn half_units(v: u64) -> String {
    if v.is_multiple_of(2) { format!("{}", v / 2) } else { format!("{}.5", v / 2) }
}

pub fn lp_report(g: &WeightedGraph, x: &Genotype) -> Result<LpReport, ExperimentError> {
    let rg = g.residual(x)?;
    let lp = solve_lp(&rg);
    Ok(LpReport {
        selection: x.to_string(),
        value2: lp.value2,
        assignment: rg.kept.iter().copied().zip(lp.assign2.iter().copied()).collect(),
    })
}

impl LpReport {
    pub fn lp_decimal(&self) -> String {
        half_units(self.value2)
    }
}

impl fmt::Display for LpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selection {}", self.selection)?;
        writeln!(f, "value2 {}", self.value2)?;
        writeln!(f, "LP {}", self.lp_decimal())?;
        let ys: Vec<String> = self.assignment.iter().map(|&(v, a)| format!("{v}:{}", half_units(a as u64))).collect();
        write!(f, "y {}", ys.join(" "))
    }
}

/// Output of the `exact` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    pub opt: u64,
    pub witness: String,
}

pub fn exact_report(g: &WeightedGraph) -> Result<ExactReport, ExperimentError> {
    let r = opt_branch_bound(g)?;
    Ok(ExactReport { opt: r.opt_cost, witness: r.witness.to_string() })
}

impl fmt::Display for ExactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OPT {}\nwitness {}", self.opt, self.witness)
    }
}
