//! Exact minimum-weight vertex cover for small instances.

use thiserror::Error;

use crate::graph::{Genotype, ResidualGraph, WeightedGraph};
use crate::lp::solve_lp;

pub const EXHAUSTIVE_LIMIT: usize = 16;
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("exhaustive search supports at most {limit} vertices, got {got}")]
    TooLarge { limit: usize, got: usize },
    #[error("branch-and-bound exceeded its budget of {budget} search nodes")]
    BudgetExceeded { budget: u64 },
}

/// Optimal cover cost and the lexicographically smallest optimal selection
/// (bit 0 compared first, `0 < 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub opt_cost: u64,
    pub witness: Genotype,
}

pub fn opt_exhaustive(g: &WeightedGraph) -> Result<ExactResult, ExactError> {
    let n = g.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(ExactError::TooLarge { limit: EXHAUSTIVE_LIMIT, got: n });
    }
    let edge_masks: Vec<u32> = g.edges().iter().map(|&(u, v)| (1 << u) | (1 << v)).collect();
    // Bit i of `mask` is x_i; reversing the low n bits turns lexicographic
    // order on x into numeric order.
    let lex_key = |mask: u32| mask.reverse_bits() >> (32 - n);
    let mut best: Option<(u64, u32)> = None;
    for mask in 0u32..(1u32 << n) {
        if !edge_masks.iter().all(|&e| mask & e != 0) {
            continue;
        }
        let cost: u64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| g.weight(i)).sum();
        let better = match best {
            None => true,
            Some((c, m)) => cost < c || (cost == c && lex_key(mask) < lex_key(m)),
        };
        if better {
            best = Some((cost, mask));
        }
    }
    let (opt_cost, mask) = best.expect("the full selection is always a cover");
    let witness = Genotype::from_bits((0..n).map(|i| mask >> i & 1 == 1).collect());
    Ok(ExactResult { opt_cost, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fix {
    Free,
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub nodes: u64,
    /// `ceil(LP(0^n))`, the bound used at the root.
    pub root_lower_bound: u64,
}

struct Search<'a> {
    g: &'a WeightedGraph,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn residual(&self, fix: &[Fix]) -> ResidualGraph {
        let mut local = vec![usize::MAX; fix.len()];
        let mut kept = Vec::new();
        for (v, f) in fix.iter().enumerate() {
            if *f == Fix::Free {
                local[v] = kept.len();
                kept.push(v);
            }
        }
        let edges = self
            .g
            .edges()
            .iter()
            .filter(|&&(u, v)| fix[u] == Fix::Free && fix[v] == Fix::Free)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        let weights = kept.iter().map(|&v| self.g.weight(v)).collect();
        ResidualGraph { kept, weights, edges }
    }

    /// Excludes `v` and forces its free neighbours in. Returns the added cost.
    fn exclude(&self, fix: &mut [Fix], v: usize) -> u64 {
        fix[v] = Fix::Out;
        let mut added = 0;
        for &u in self.g.neighbors(v) {
            if fix[u] == Fix::Free {
                fix[u] = Fix::In;
                added += self.g.weight(u);
            }
        }
        added
    }

    /// Searches for a cover cheaper than `*bound` extending `fix`. On success
    /// `*bound` and `*best` are updated. With `first_only`, stops at the first
    /// improvement.
    fn descend(
        &mut self,
        fix: &mut Vec<Fix>,
        cost_in: u64,
        bound: &mut u64,
        best: &mut Option<Vec<Fix>>,
        first_only: bool,
    ) -> Result<bool, ExactError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(ExactError::BudgetExceeded { budget: self.budget });
        }
        if cost_in >= *bound {
            return Ok(false);
        }
        let rg = self.residual(fix);
        if rg.edges.is_empty() {
            *bound = cost_in;
            *best = Some(fix.clone());
            return Ok(true);
        }
        let lp2 = solve_lp(&rg).value2;
        if cost_in + lp2.div_ceil(2) >= *bound {
            return Ok(false);
        }
        let mut degree = vec![0u64; rg.vertex_count()];
        for &(u, v) in &rg.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let pick = (0..rg.vertex_count())
            .max_by_key(|&i| (degree[i] * rg.weights[i], std::cmp::Reverse(i)))
            .map(|i| rg.kept[i])
            .expect("residual has an edge");

        let mut found = false;
        let saved = fix.clone();

        fix[pick] = Fix::In;
        found |= self.descend(fix, cost_in + self.g.weight(pick), bound, best, first_only)?;
        fix.copy_from_slice(&saved);
        if found && first_only {
            return Ok(true);
        }

        let added = self.exclude(fix, pick);
        found |= self.descend(fix, cost_in + added, bound, best, first_only)?;
        fix.copy_from_slice(&saved);
        Ok(found)
    }
}

pub fn opt_branch_bound(g: &WeightedGraph) -> Result<ExactResult, ExactError> {
    opt_branch_bound_with_budget(g, DEFAULT_NODE_BUDGET).map(|(r, _)| r)
}

/// Branch-and-bound with an LP lower bound at every node. The witness is
/// canonicalized afterwards to the lexicographically smallest optimum, so the
/// result equals [`opt_exhaustive`] wherever both run. `budget` caps the total
/// number of search nodes, canonicalization included.
pub fn opt_branch_bound_with_budget(
    g: &WeightedGraph,
    budget: u64,
) -> Result<(ExactResult, SearchStats), ExactError> {
    let n = g.n();
    let mut search = Search { g, nodes: 0, budget };
    let root_lower_bound = solve_lp(&g.full_residual()).value2.div_ceil(2);

    let mut fix = vec![Fix::Free; n];
    let mut bound = g.total_weight() + 1;
    let mut best = None;
    search.descend(&mut fix, 0, &mut bound, &mut best, false)?;
    let opt_cost = bound;

    // Fix bits left to right, preferring 0 whenever an optimum survives.
    let mut fixed = vec![Fix::Free; n];
    let mut cost_in = 0;
    for i in 0..n {
        if fixed[i] != Fix::Free {
            continue;
        }
        let mut trial = fixed.clone();
        let added = search.exclude(&mut trial, i);
        let mut trial_bound = opt_cost + 1;
        let mut sink = None;
        if search.descend(&mut trial.clone(), cost_in + added, &mut trial_bound, &mut sink, true)? {
            fixed = trial;
            cost_in += added;
        } else {
            fixed[i] = Fix::In;
            cost_in += g.weight(i);
        }
    }
    debug_assert_eq!(cost_in, opt_cost);
    let witness = Genotype::from_bits(fixed.iter().map(|f| *f == Fix::In).collect());
    let stats = SearchStats { nodes: search.nodes, root_lower_bound };
    Ok((ExactResult { opt_cost, witness }, stats))
}
