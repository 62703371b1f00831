//! Sequential random subspace (SRS) feature selection under a feature-memory
//! budget.
//!
//! The crate is organised around a handful of modules:
//!
//! - [`distribution`]: explicit joint distributions over discrete variables
//!   and exact relevance oracles (conditional mutual information, degree,
//!   Markov boundary, asymptotic importance of totally randomized trees).
//! - [`dataset`]: discrete datasets, scenario generators and CSV persistence.
//! - [`tree`]: randomized multiway decision trees with mean decrease impurity.
//! - [`srs`]: the sequential random subspace driver and its probe-based
//!   acceptance test.
//! - [`convergence`]: Markov-chain models of the number of relevant features
//!   found, plus a Monte-Carlo simulator used to cross-check them.
//! - [`evaluation`]: selection scores and accuracy.
//! - [`cli`]: the `seqsub` command-line front end.

pub mod cli;
pub mod convergence;
pub mod dataset;
pub mod distribution;
mod error;
pub mod evaluation;
pub mod records;
pub mod srs;
pub mod tree;

pub use error::{Error, Result};
