//! Logic-constrained shortest paths on DAGs.
//!
//! An instance is a weighted DAG, a CNF formula and a partial mapping from
//! arcs to formula variables. A path induces an assignment of the mapped
//! variables (true on the path, false elsewhere); it is feasible if the
//! remaining variables can be set so that the formula holds. [`solver::solve`]
//! finds a cheapest feasible path by branch and bound.
//!
//! The algorithms are generic over the weight type (see [`scalar::Weight`]).
//! Integer weights give exact results; the aliases below fix `i64`.

pub mod dag;
pub mod dynsp;
pub mod logic;
pub mod scalar;
pub mod solver;

/// Exact path cost.
pub type Cost = i64;
pub type IntDag = dag::Dag<Cost>;
pub type IntPath = dag::Path<Cost>;
pub type IntInstance = solver::Instance<Cost>;
pub type IntSolution = solver::Solution<Cost>;
pub type IntSolveStats = solver::SolveStats<Cost>;

pub type FloatDag = dag::Dag<f64>;
pub type FloatInstance = solver::Instance<f64>;
