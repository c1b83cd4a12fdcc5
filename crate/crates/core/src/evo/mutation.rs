//! Bit-flip mutation operators.

use rand::Rng;

use crate::graph::{Genotype, WeightedGraph};

fn flip_one_in_n<R: Rng + ?Sized>(rng: &mut R, n: usize) -> bool {
    rng.gen_range(0..n) == 0
}

/// Flips every bit independently with probability `1/n`.
pub fn standard_mutation<R: Rng + ?Sized>(x: &Genotype, rng: &mut R) -> Genotype {
    let n = x.len();
    let mut child = x.clone();
    for i in 0..n {
        if flip_one_in_n(rng, n) {
            child.flip(i);
        }
    }
    child
}

/// Vertices with at least one uncovered edge in `G(x)`. Selected vertices
/// never qualify since all their edges are covered.
pub fn uncovered_incidence(g: &WeightedGraph, x: &Genotype) -> Vec<bool> {
    let mut mark = vec![false; g.n()];
    for &(u, v) in g.edges() {
        if !x.get(u) && !x.get(v) {
            mark[u] = true;
            mark[v] = true;
        }
    }
    mark
}

/// With probability 1/2 this is [`standard_mutation`]. Otherwise, bits of
/// vertices incident to an uncovered edge flip with probability 1/2 and all
/// other bits with probability `1/n`.
pub fn alternative_mutation<R: Rng + ?Sized>(g: &WeightedGraph, x: &Genotype, rng: &mut R) -> Genotype {
    if rng.gen::<bool>() {
        alternative_branch(g, x, rng)
    } else {
        standard_mutation(x, rng)
    }
}

/// The `b = 1` branch of [`alternative_mutation`].
pub fn alternative_branch<R: Rng + ?Sized>(g: &WeightedGraph, x: &Genotype, rng: &mut R) -> Genotype {
    let n = x.len();
    let incident = uncovered_incidence(g, x);
    let mut child = x.clone();
    for (i, &hit) in incident.iter().enumerate() {
        let flip = if hit { rng.gen::<bool>() } else { flip_one_in_n(rng, n) };
        if flip {
            child.flip(i);
        }
    }
    child
}
