//! Solver library for the Smoluchowski coagulation equation with
//! separable frequency kernels, built on the exponential binary-tree
//! series solution of the transformed equation.
//!
//! The layers, bottom up:
//!
//! - [`tree`]: exact combinatorics of rooted planar binary trees (the
//!   word-code codec, grafting, branching, weights, twist classes).
//! - [`series`]: exponential tree series as exact rational coefficient
//!   vectors, the branching operator in matrix form, and the equivalent
//!   closed forms of the series solution. This layer is the ground truth
//!   the floating-point solver is tested against.
//! - [`spectral`]: the FFT realization of the non-associative star
//!   product for separable kernels, with a direct double-sum oracle.
//! - [`solver`]: order-N time stepping by the truncated non-planar tree
//!   expansion.
//! - [`exact`]: closed-form reference solutions for the constant,
//!   additive and multiplicative kernels.
//! - [`convergence`]: error sweeps and slope fits for convergence
//!   studies.
//! - [`export`]: deterministic CSV/JSON serialization.

pub mod convergence;
pub mod exact;
pub mod export;
pub mod series;
pub mod solver;
pub mod spectral;
pub mod tree;

pub use solver::{build_plan, run, step, EvaluationPlan, SolverConfig, Trajectory};
pub use spectral::{GridFunction, GridSpec, KernelSpec, SpectralFunction};
pub use tree::{Forest, Tree, TreeTriple};
