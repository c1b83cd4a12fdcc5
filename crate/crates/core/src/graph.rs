//! Weighted undirected graphs, selections over their vertices and the
//! residual graph left after removing a selection.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} has weight {weight}; weights must be >= 1")]
    NonPositiveWeight { vertex: usize, weight: i64 },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) has an endpoint outside [0, {n})")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("selection has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Immutable vertex-weighted graph. Edges are stored normalized (`u < v`),
/// sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedGraph {
    weights: Vec<u64>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl WeightedGraph {
    pub fn new(n: usize, weights: &[i64], edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if weights.len() != n {
            return Err(GraphError::WeightCount { expected: n, got: weights.len() });
        }
        if let Some((vertex, &weight)) = weights.iter().enumerate().find(|(_, &w)| w < 1) {
            return Err(GraphError::NonPositiveWeight { vertex, weight });
        }
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EndpointOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            weights: weights.iter().map(|&w| w as u64).collect(),
            edges: norm,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(1)
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn check_len(&self, x: &Genotype) -> Result<(), GraphError> {
        if x.len() != self.n() {
            return Err(GraphError::LengthMismatch { expected: self.n(), got: x.len() });
        }
        Ok(())
    }

    /// Total weight of the selected vertices.
    pub fn cost(&self, x: &Genotype) -> Result<u64, GraphError> {
        self.check_len(x)?;
        Ok(x.ones().map(|i| self.weights[i]).sum())
    }

    pub fn is_cover(&self, x: &Genotype) -> Result<bool, GraphError> {
        self.check_len(x)?;
        Ok(self.edges.iter().all(|&(u, v)| x.get(u) || x.get(v)))
    }

    /// The graph `G(x)`: selected vertices and every edge they touch are removed.
    pub fn residual(&self, x: &Genotype) -> Result<ResidualGraph, GraphError> {
        self.check_len(x)?;
        let mut local = vec![usize::MAX; self.n()];
        let mut kept = Vec::with_capacity(self.n());
        for (v, slot) in local.iter_mut().enumerate() {
            if !x.get(v) {
                *slot = kept.len();
                kept.push(v);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| !x.get(u) && !x.get(v))
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        let weights = kept.iter().map(|&v| self.weights[v]).collect();
        Ok(ResidualGraph { kept, weights, edges })
    }

    /// The residual graph for the empty selection.
    pub fn full_residual(&self) -> ResidualGraph {
        ResidualGraph {
            kept: (0..self.n()).collect(),
            weights: self.weights.clone(),
            edges: self.edges.clone(),
        }
    }
}

/// Subgraph induced on the unselected vertices, restricted to uncovered edges.
/// Vertices are renumbered `0..kept.len()`; `kept[i]` maps back to the
/// original index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualGraph {
    pub kept: Vec<usize>,
    pub weights: Vec<u64>,
    pub edges: Vec<(usize, usize)>,
}

impl ResidualGraph {
    pub fn from_parts(weights: Vec<u64>, edges: Vec<(usize, usize)>) -> Self {
        let kept = (0..weights.len()).collect();
        Self { kept, weights, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.kept.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Local vertices touching at least one residual edge.
    pub fn non_isolated(&self) -> Vec<bool> {
        let mut mark = vec![false; self.kept.len()];
        for &(u, v) in &self.edges {
            mark[u] = true;
            mark[v] = true;
        }
        mark
    }
}

/// A selection of vertices, one bit per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    bits: Vec<bool>,
}

impl Genotype {
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones_string(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// `x <= y` bitwise.
    pub fn is_subset_of(&self, other: &Genotype) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Genotype {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(GraphError::Parse {
                    line: 0,
                    msg: format!("invalid bit {other:?} in selection"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Genotype::from_bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstanceKind {
    Gnp { n: usize, p: f64 },
    Path { n: usize },
    /// Center vertex 0 plus `k` leaves.
    Star { k: usize },
    CompleteBipartite { a: usize, b: usize },
}

/// Deterministic instance generator. Weights are uniform in `[1, w_max]`.
pub fn gen_instance(kind: InstanceKind, w_max: u64, seed: u64) -> Result<WeightedGraph, GraphError> {
    if w_max < 1 {
        return Err(GraphError::InvalidParams("w_max must be >= 1".into()));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let (n, edges) = match kind {
        InstanceKind::Gnp { n, p } => {
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(GraphError::InvalidParams(format!("gnp needs n >= 1 and p in [0,1], got n={n} p={p}")));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            (n, edges)
        }
        InstanceKind::Path { n } => {
            if n == 0 {
                return Err(GraphError::InvalidParams("path needs n >= 1".into()));
            }
            (n, (1..n).map(|v| (v - 1, v)).collect())
        }
        InstanceKind::Star { k } => (k + 1, (1..=k).map(|v| (0, v)).collect()),
        InstanceKind::CompleteBipartite { a, b } => {
            if a + b == 0 {
                return Err(GraphError::InvalidParams("complete-bipartite needs a + b >= 1".into()));
            }
            let mut edges = Vec::with_capacity(a * b);
            for u in 0..a {
                for v in 0..b {
                    edges.push((u, a + v));
                }
            }
            (a + b, edges)
        }
    };
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=w_max) as i64).collect();
    WeightedGraph::new(n, &weights, &edges)
}

/// Canonical text form: `p wvc n m`, then `v i w` lines, then `e u v` lines.
pub fn serialize(g: &WeightedGraph) -> String {
    let mut out = format!("p wvc {} {}\n", g.n(), g.m());
    for (i, w) in g.weights().iter().enumerate() {
        out.push_str(&format!("v {i} {w}\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    out
}

pub fn parse(text: &str) -> Result<WeightedGraph, GraphError> {
    let err = |line: usize, msg: String| GraphError::Parse { line, msg };
    let mut header: Option<(usize, usize)> = None;
    let mut weights: Vec<i64> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<i64, GraphError> {
            s.parse::<i64>().map_err(|_| err(lineno, format!("not an integer: {s:?}")))
        };
        let index = |s: &str| -> Result<usize, GraphError> {
            s.parse::<usize>().map_err(|_| err(lineno, format!("not an index: {s:?}")))
        };
        match fields.as_slice() {
            ["p", "wvc", n, m] => {
                if header.is_some() {
                    return Err(err(lineno, "duplicate header".into()));
                }
                header = Some((index(n)?, index(m)?));
            }
            ["v", i, w] => {
                let Some((n, _)) = header else {
                    return Err(err(lineno, "vertex line before header".into()));
                };
                if !edges.is_empty() {
                    return Err(err(lineno, "vertex line after edge lines".into()));
                }
                let i = index(i)?;
                if i != weights.len() || i >= n {
                    return Err(err(lineno, format!("expected vertex {} (of {n}), got {i}", weights.len())));
                }
                weights.push(num(w)?);
            }
            ["e", u, v] => {
                let Some((n, _)) = header else {
                    return Err(err(lineno, "edge line before header".into()));
                };
                if weights.len() != n {
                    return Err(err(lineno, format!("expected {n} vertex lines before edges, got {}", weights.len())));
                }
                let (u, v) = (index(u)?, index(v)?);
                if u >= v {
                    return Err(err(lineno, format!("edge endpoints must satisfy u < v, got {u} {v}")));
                }
                edges.push((u, v));
            }
            _ => return Err(err(lineno, format!("unrecognized line {line:?}"))),
        }
    }
    let (n, m) = header.ok_or_else(|| err(0, "missing header".into()))?;
    if weights.len() != n {
        return Err(err(0, format!("header declares {n} vertices, found {}", weights.len())));
    }
    if edges.len() != m {
        return Err(err(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    WeightedGraph::new(n, &weights, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Genotype {
        s.parse().unwrap()
    }

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, &[1, 1, 1], &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn build_minimal_and_edgeless() {
        let g = WeightedGraph::new(2, &[1, 5], &[(0, 1)]).unwrap();
        assert_eq!(g.m(), 1);
        let g = WeightedGraph::new(1, &[3], &[]).unwrap();
        assert_eq!(g.m(), 0);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            WeightedGraph::new(2, &[0, 1], &[(0, 1)]),
            Err(GraphError::NonPositiveWeight { vertex: 0, .. })
        ));
        assert_eq!(WeightedGraph::new(2, &[1, 1], &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(matches!(
            WeightedGraph::new(2, &[1, 1], &[(0, 2)]),
            Err(GraphError::EndpointOutOfRange { .. })
        ));
        assert!(matches!(WeightedGraph::new(2, &[1, -3], &[]), Err(GraphError::NonPositiveWeight { .. })));
    }

    #[test]
    fn multi_edges_collapse() {
        let g = WeightedGraph::new(3, &[1, 1, 1], &[(1, 0), (0, 1), (2, 1), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn residual_examples() {
        let g = triangle();
        let r = g.residual(&bits("100")).unwrap();
        assert_eq!(r.vertex_count(), 2);
        assert_eq!(r.edge_count(), 1);
        assert_eq!(r.kept, vec![1, 2]);
        assert_eq!(r.edges, vec![(0, 1)]);
        assert_eq!(g.residual(&bits("111")).unwrap().edge_count(), 0);
        assert_eq!(g.residual(&Genotype::zeros(3)).unwrap(), g.full_residual());
        assert!(g.residual(&bits("10")).is_err());
    }

    #[test]
    fn cost_examples() {
        let g = WeightedGraph::new(2, &[1, 5], &[(0, 1)]).unwrap();
        assert_eq!(g.cost(&bits("01")).unwrap(), 5);
        assert_eq!(g.cost(&bits("00")).unwrap(), 0);
        let g = WeightedGraph::new(3, &[2, 3, 4], &[]).unwrap();
        assert_eq!(g.cost(&bits("111")).unwrap(), 9);
        assert!(matches!(g.cost(&bits("1")), Err(GraphError::LengthMismatch { .. })));
    }

    #[test]
    fn is_cover_examples() {
        let g = WeightedGraph::new(2, &[1, 1], &[(0, 1)]).unwrap();
        assert!(g.is_cover(&bits("10")).unwrap());
        assert!(!triangle().is_cover(&bits("100")).unwrap());
        let g = WeightedGraph::new(4, &[1; 4], &[]).unwrap();
        assert!(g.is_cover(&Genotype::zeros(4)).unwrap());
    }

    #[test]
    fn generator_shapes() {
        let g = gen_instance(InstanceKind::Star { k: 3 }, 1, 0).unwrap();
        assert_eq!((g.n(), g.m()), (4, 3));
        assert!(g.weights().iter().all(|&w| w == 1));
        let g = gen_instance(InstanceKind::Path { n: 3 }, 5, 0).unwrap();
        assert_eq!(g.m(), 2);
        let g = gen_instance(InstanceKind::CompleteBipartite { a: 2, b: 3 }, 5, 0).unwrap();
        assert_eq!((g.n(), g.m()), (5, 6));
        let a = gen_instance(InstanceKind::Gnp { n: 8, p: 0.5 }, 9, 42).unwrap();
        let b = gen_instance(InstanceKind::Gnp { n: 8, p: 0.5 }, 9, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.weights().iter().all(|&w| (1..=9).contains(&w)));
        assert!(gen_instance(InstanceKind::Path { n: 3 }, 0, 0).is_err());
        assert!(gen_instance(InstanceKind::Gnp { n: 3, p: 1.5 }, 1, 0).is_err());
    }

    #[test]
    fn parse_examples() {
        let t = "p wvc 2 1\nv 0 1\nv 1 5\ne 0 1\n";
        let g = parse(t).unwrap();
        assert_eq!(g, WeightedGraph::new(2, &[1, 5], &[(0, 1)]).unwrap());
        assert_eq!(serialize(&g), t);

        let commented = "# a comment\n\np wvc 2 1\nv 0 1\n  # another\nv 1 5\n\ne 0 1\n";
        assert_eq!(parse(commented).unwrap(), g);

        assert!(parse("p wvc 2 1\nv 0 1\ne 0 1\n").is_err());
        assert!(parse("p wvc 2 2\nv 0 1\nv 1 5\ne 0 1\n").is_err());
        assert!(parse("p wvc 2 1\nv 0 1\nv 1 5\ne 1 0\n").is_err());
        assert!(parse("p wvc 2 1\nv 0 1\nv 1 x\ne 0 1\n").is_err());
        assert!(parse("v 0 1\n").is_err());
        assert!(parse("p wvc 2 0\nv 0 0\nv 1 1\n").is_err());
    }
}
