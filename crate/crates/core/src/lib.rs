//! Evolutionary multi-objective search for minimum-weight vertex cover.
//!
//! The fitness of a selection `x` is the pair `(Cost(x), LP(x))` where
//! `LP(x)` is the fractional vertex cover optimum of the residual graph
//! `G(x)`. LP values are half-integral, so they are carried everywhere as
//! exact integers in half-units (`lp2 = 2 * LP`).

pub mod exact;
pub mod experiment;
pub mod evo;
pub mod flow;
pub mod graph;
pub mod lp;

pub use graph::{Genotype, GraphError, InstanceKind, ResidualGraph, WeightedGraph};
pub use lp::{HalfIntegralLP, LpError};
