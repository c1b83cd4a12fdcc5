//! Fractional weighted vertex cover, solved exactly in half-units.
//!
//! The LP optimum of a graph equals half the minimum cut of its bipartite
//! double cover: every vertex `v` becomes `v_L` (fed from the source with
//! capacity `w(v)`) and `v_R` (draining to the sink with capacity `w(v)`),
//! and every edge `{u, v}` contributes uncapacitated arcs `u_L -> v_R` and
//! `v_L -> u_R`. A cut `(S, T)` maps to the cover
//! `2*y_v = [v_L in T] + [v_R in S]`, which is feasible and costs exactly the
//! cut capacity, so the cover read off the minimum cut is optimal and lies in
//! `{0, 1/2, 1}`.

use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::graph::{Genotype, GraphError, ResidualGraph, WeightedGraph};

/// Largest residual graph the enumeration oracle accepts (`3^k` assignments).
pub const BRUTE_FORCE_LIMIT: usize = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("brute-force LP supports at most {limit} vertices, got {got}")]
    TooLarge { limit: usize, got: usize },
}

/// Half-integral fractional cover stored as `assign2[i] = 2*y_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralLP {
    pub assign2: Vec<u8>,
    pub value2: u64,
}

impl HalfIntegralLP {
    /// `y_u + y_v >= 1` on every edge and every entry in `{0, 1/2, 1}`.
    pub fn is_feasible_for(&self, rg: &ResidualGraph) -> bool {
        self.assign2.len() == rg.vertex_count()
            && self.assign2.iter().all(|&a| a <= 2)
            && rg.edges.iter().all(|&(u, v)| self.assign2[u] + self.assign2[v] >= 2)
    }

    pub fn weighted_sum(&self, weights: &[u64]) -> u64 {
        self.assign2.iter().zip(weights).map(|(&a, &w)| a as u64 * w).sum()
    }
}

const SOURCE: usize = 0;
const SINK: usize = 1;

fn left(v: usize) -> usize {
    2 + 2 * v
}

fn right(v: usize) -> usize {
    3 + 2 * v
}

fn double_cover(rg: &ResidualGraph) -> FlowNetwork {
    let k = rg.vertex_count();
    let unbounded = rg.weights.iter().sum::<u64>() + 1;
    let mut net = FlowNetwork::new(2 + 2 * k);
    let touched = rg.non_isolated();
    for (v, &t) in touched.iter().enumerate() {
        if t {
            net.add_arc(SOURCE, left(v), rg.weights[v]);
            net.add_arc(right(v), SINK, rg.weights[v]);
        }
    }
    for &(u, v) in &rg.edges {
        net.add_arc(left(u), right(v), unbounded);
        net.add_arc(left(v), right(u), unbounded);
    }
    net
}

/// Max-flow value of the double-cover network, i.e. twice the LP optimum.
pub fn double_cover_max_flow(rg: &ResidualGraph) -> u64 {
    double_cover(rg).max_flow(SOURCE, SINK)
}

/// Optimal half-integral fractional cover, read off the source-minimal
/// minimum cut. Isolated vertices get 0.
pub fn solve_lp(rg: &ResidualGraph) -> HalfIntegralLP {
    if rg.edges.is_empty() {
        return HalfIntegralLP { assign2: vec![0; rg.vertex_count()], value2: 0 };
    }
    let mut net = double_cover(rg);
    let flow = net.max_flow(SOURCE, SINK);
    let reach = net.source_side(SOURCE);
    let touched = rg.non_isolated();
    let assign2: Vec<u8> = (0..rg.vertex_count())
        .map(|v| {
            if !touched[v] {
                return 0;
            }
            u8::from(!reach[left(v)]) + u8::from(reach[right(v)])
        })
        .collect();
    let value2 = assign2.iter().zip(&rg.weights).map(|(&a, &w)| a as u64 * w).sum();
    debug_assert_eq!(value2, flow);
    HalfIntegralLP { assign2, value2 }
}

/// `2 * LP(x)`: the doubled LP optimum of `G(x)`.
pub fn lp_value2(g: &WeightedGraph, x: &Genotype) -> Result<u64, GraphError> {
    Ok(solve_lp(&g.residual(x)?).value2)
}

/// Exhaustive minimum over `{0, 1/2, 1}^k`; ties go to the lexicographically
/// smallest `assign2`.
pub fn brute_force_lp(rg: &ResidualGraph) -> Result<HalfIntegralLP, LpError> {
    let k = rg.vertex_count();
    if k > BRUTE_FORCE_LIMIT {
        return Err(LpError::TooLarge { limit: BRUTE_FORCE_LIMIT, got: k });
    }
    let mut cur = vec![0u8; k];
    let mut best: Option<HalfIntegralLP> = None;
    loop {
        if rg.edges.iter().all(|&(u, v)| cur[u] + cur[v] >= 2) {
            let value2: u64 = cur.iter().zip(&rg.weights).map(|(&a, &w)| a as u64 * w).sum();
            if best.as_ref().is_none_or(|b| value2 < b.value2) {
                best = Some(HalfIntegralLP { assign2: cur.clone(), value2 });
            }
        }
        // Odometer with the last position fastest, so assignments are
        // visited in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(best.expect("the all-ones assignment is always feasible"));
            }
            i -= 1;
            if cur[i] < 2 {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rg(weights: &[u64], edges: &[(usize, usize)]) -> ResidualGraph {
        ResidualGraph::from_parts(weights.to_vec(), edges.to_vec())
    }

    #[test]
    fn single_edge() {
        let g = rg(&[1, 5], &[(0, 1)]);
        let lp = solve_lp(&g);
        assert_eq!(lp.value2, 2);
        assert_eq!(lp.assign2, vec![2, 0]);
        assert_eq!(brute_force_lp(&g).unwrap().value2, 2);
        assert_eq!(brute_force_lp(&rg(&[1, 1], &[(0, 1)])).unwrap().value2, 2);
    }

    #[test]
    fn unit_triangle_is_all_halves() {
        let g = rg(&[1, 1, 1], &[(0, 1), (1, 2), (0, 2)]);
        let lp = solve_lp(&g);
        assert_eq!(lp.value2, 3);
        assert_eq!(lp.assign2, vec![1, 1, 1]);
        let bf = brute_force_lp(&g).unwrap();
        assert_eq!(bf.value2, 3);
        assert_eq!(bf.assign2, vec![1, 1, 1]);
    }

    #[test]
    fn edgeless() {
        let g = rg(&[4, 2], &[]);
        assert_eq!(solve_lp(&g), HalfIntegralLP { assign2: vec![0, 0], value2: 0 });
        assert_eq!(brute_force_lp(&g).unwrap().value2, 0);
    }

    #[test]
    fn weighted_star_takes_center() {
        let g = rg(&[2, 1, 1, 1], &[(0, 1), (0, 2), (0, 3)]);
        let lp = solve_lp(&g);
        assert_eq!(lp.value2, 4);
        assert_eq!(lp.assign2, vec![2, 0, 0, 0]);
        assert_eq!(brute_force_lp(&g).unwrap().value2, 4);
    }

    #[test]
    fn four_cycle() {
        let g = rg(&[1; 4], &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        assert_eq!(brute_force_lp(&g).unwrap().value2, 4);
        assert_eq!(solve_lp(&g).value2, 4);
    }

    #[test]
    fn isolated_vertices_get_zero() {
        let g = rg(&[3, 1, 1, 7], &[(1, 2)]);
        let lp = solve_lp(&g);
        assert_eq!(lp.assign2[0], 0);
        assert_eq!(lp.assign2[3], 0);
        assert_eq!(lp.value2, 2);
        assert!(lp.is_feasible_for(&g));
    }

    #[test]
    fn lp_value2_examples() {
        let tri = WeightedGraph::new(3, &[1, 1, 1], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(lp_value2(&tri, &Genotype::zeros(3)).unwrap(), 3);
        assert_eq!(lp_value2(&tri, &Genotype::ones_string(3)).unwrap(), 0);
        let edge = WeightedGraph::new(2, &[1, 1], &[(0, 1)]).unwrap();
        assert_eq!(lp_value2(&edge, &"10".parse().unwrap()).unwrap(), 0);
    }

    #[test]
    fn brute_force_rejects_large() {
        let g = rg(&[1; 15], &[]);
        assert_eq!(brute_force_lp(&g), Err(LpError::TooLarge { limit: 14, got: 15 }));
    }

    #[test]
    fn flow_equals_value() {
        let g = rg(&[3, 1, 4, 1, 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]);
        let lp = solve_lp(&g);
        assert_eq!(double_cover_max_flow(&g), lp.value2);
        assert_eq!(lp.value2, brute_force_lp(&g).unwrap().value2);
    }
}
