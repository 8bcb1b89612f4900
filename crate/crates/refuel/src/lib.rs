//! Exact solver and benchmark harness for the airplane refueling problem.
//!
//! A fleet of airplanes refuel each other in flight; finding the drop-out
//! order that carries the last airplane furthest is the single-machine
//! scheduling problem of maximizing `sum w_j / C_j`. This crate provides:
//!
//! - [`core`]: domain types, the auxiliary function `phi`, payoff
//!   evaluation, and the adjacent-swap identity;
//! - [`dominance`]: pairwise dominance classification, banned start-time
//!   intervals, cut grids, and a schedule validator;
//! - [`solver`]: the recursive exact solver that branches on the pivot
//!   job's feasible start times and counts the schedules it enumerates;
//! - [`baselines`]: brute force, a potential-schedule counter, greedy
//!   construction, and best-first search over job subsets;
//! - [`gen`]: seeded random instances and datasets;
//! - [`bench`]: a timing harness with timeouts plus speedup and hardness
//!   reports.
//!
//! All solve paths run in one of two numeric modes: `f64` throughout, or
//! arbitrary-precision rationals where every comparison is exact.

pub mod baselines;
pub mod bench;
pub mod core;
pub mod dominance;
pub mod error;
pub mod gen;
pub mod scalar;
pub mod solver;

pub use crate::core::{Instance, Job, JobId, Schedule};
pub use crate::error::{Error, Result};
pub use crate::scalar::{NumericMode, Scalar};
pub use crate::solver::{Algo, SolveOptions, SolveReport};
