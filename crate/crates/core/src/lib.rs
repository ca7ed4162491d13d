//! Learning undirected weighted graphs from stationary graph signals.
//!
//! A signal `x = h(S) w` produced by a polynomial filter of the adjacency
//! matrix `S` driven by white noise has a covariance that commutes with `S`.
//! This crate turns that structural fact into graph-learning machinery:
//!
//! - [`solvers::solve_rlogspect`] minimizes an l1 objective with a log
//!   barrier on node degrees subject to a Frobenius bound on the commutator
//!   `CS - SC`, using a linearized ADMM whose subproblems are all closed
//!   form.
//! - [`solvers::solve_rspect`] solves the classical row-sum-normalized
//!   formulation, and [`feasibility`] certifies when that formulation is
//!   infeasible and computes the smallest feasible commutator radius.
//! - [`graphs`] and [`signals`] provide the random-graph ensembles, graph
//!   filters, and covariance estimators used to benchmark recovery, and
//!   [`evaluation`] scores learned graphs against ground truth.

pub mod error;
pub mod evaluation;
pub mod feasibility;
pub mod graphs;
pub mod linops;
pub mod proj;
pub mod signals;
pub mod solvers;

pub use error::{Error, Result};
