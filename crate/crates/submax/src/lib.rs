//! Solvers for maximizing non-negative monotone continuous submodular
//! functions subject to an ℓ1 (knapsack) budget.
//!
//! The crate provides:
//!
//! - [`problem`]: the data model (points, box domains, black-box objectives,
//!   instances) and instance-normalizing transforms.
//! - [`onedim`]: the two one-dimensional subroutines every solver relies on:
//!   a grid-based ratio maximizer and a bisection-based target-value finder,
//!   both derivative-free with additive `ε·L` error guarantees.
//! - [`solvers`]: plain coordinate ascent, the enhanced variant that also
//!   tries every single-coordinate solution, and the fully enhanced variant
//!   that guesses two heavy coordinates before descending.
//! - [`objectives`]: submodular quadratic and concave-of-linear test families
//!   plus empirical checkers for submodularity, monotonicity and the
//!   diminishing-returns property.
//! - [`oracle`]: brute-force references (grid search for the optimum, dense
//!   one-dimensional scans, an instrumented progress verifier) used by the
//!   test harness.

pub mod objectives;
pub mod onedim;
pub mod oracle;
pub mod problem;
pub mod solvers;

pub use problem::{
    contract, feasibility_tol, feasible, rescale_weights, shift_domain, BoxDomain, Objective,
    Point, ProblemInstance, SolveResult, TraceEntry,
};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("target value {v} outside reachable range [{lo}, {hi}]")]
    TargetOutOfRange { v: f64, lo: f64, hi: f64 },
    #[error("grid search requires {required} points, cap is {cap}")]
    GridCapExceeded { required: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
