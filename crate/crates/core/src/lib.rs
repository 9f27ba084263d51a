//! Representative-set approximation scheme for budgeted matching and
//! budgeted matroid intersection.
//!
//! An instance is a ground set of elements carrying integer costs and
//! profits, a combinatorial constraint (a matching constraint on a graph
//! whose edges are the elements, or the intersection of two matroids), and a
//! budget. The scheme partitions the high-profit elements into geometric
//! profit classes, builds a small exchange set per class, enumerates
//! feasible skeletons inside the union of those exchange sets and completes
//! each skeleton with low-profit elements through a Lagrangian subroutine.
//!
//! The [`oracle`] module holds exhaustive brute-force verifiers for every
//! structural guarantee the scheme relies on; they are exponential and only
//! meant for small instances.

pub mod classes;
pub mod constraint;
mod enumerate;
pub mod error;
pub mod exchange;
pub mod instance;
pub mod lagrange;
pub mod matroid;
pub mod oracle;
pub mod repset;
pub mod solver;

pub use classes::{class_index, class_partition, q_of, small_profit_pool, ClassLayout};
pub use constraint::{
    is_bounded_feasible, is_feasible, residual_constraint, Constraint, MatchingGraph, MatroidPair,
};
pub use error::{Error, Result};
pub use exchange::{
    exset_matching, exset_matroid_intersection, extension_candidates, greedy_min_cost_matching,
    is_semi_shift, is_shift, Chain, ExchangeConfig, ExchangeSet,
};
pub use instance::{
    is_solution, preprocess_discard, validate_instance, BcInstance, Element, ElementId, Epsilon,
    IdSet, Preprocessed, Solution, ValidationReport, Violation,
};
pub use lagrange::{approx_opt, non_profitable_solver, AlphaEstimate, AlphaMode, InnerOracle, LagrangeConfig};
pub use matroid::{
    is_independent, min_cost_basis, restrict_truncate, weak_exchange_extend, ContractedMatroid,
    GraphicMatroid, Matroid, PartitionMatroid, RestrictedTruncatedMatroid, UniformMatroid,
};
pub use repset::{rep_set, rep_set_with_alpha, RepSetConfig, RepresentativeSet};
pub use solver::{eptas, residual_instance, solve, EptasOutcome, ResidualInstance, SolverConfig};
