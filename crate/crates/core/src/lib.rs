//! Symmetric rule-based Achlioptas processes for random k-SAT.
//!
//! At every step `ell` uniformly random k-clauses are offered and a selection
//! rule keeps one of them. Each kept clause is projected to a 2-clause whose
//! sign pattern depends only on its number of positive literals; if the
//! projected 2-CNF is satisfiable (checked through the implication digraph),
//! so is the k-CNF. The projected type frequencies `(p0, p1, p2)` give the
//! two-type branching mean matrix and the closed-form certified density
//! `alpha = 1 / Q` with `Q = p1 + 2 sqrt(p0 p2)`.
//!
//! Modules:
//! - [`clause`]: k-clauses, uniform sampling, sign classes and their masses.
//! - [`rules`]: the per-step selection rules.
//! - [`projection`]: 2-SAT projection, implication digraph, SCC certificate.
//! - [`analytics`]: type frequencies, `Q`, thresholds, spectral data.
//! - [`branching`]: two-type Poisson Galton-Watson simulation.
//! - [`harness`]: full processes, SAT-fraction estimates, sweeps, bisection.
//! - [`oracle`]: exhaustive ground truth at desk scale.

pub mod analytics;
pub mod branching;
pub mod clause;
#[cfg(feature = "cli")]
pub mod cli;
pub mod dimacs;
mod error;
pub mod harness;
pub mod oracle;
pub mod projection;
pub mod report;
pub mod rng;
pub mod rules;
pub mod validate;

pub use error::{Error, Result};
