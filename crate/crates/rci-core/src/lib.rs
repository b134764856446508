//! Sample-specific root-cause scores for a binary label under a linear
//! non-Gaussian SEM.
//!
//! The pipeline extracts exogenous error terms from observational data by
//! iterated root search over an entropy-based pairwise independence measure,
//! fits a logistic model of the label on the extracted errors, and scores each
//! sample/variable pair as the product of its error value and the fitted
//! coefficient. A label-screened extraction ("Local Plus") prunes variables
//! whose columns test independent of the label, which shrinks the search from
//! all p variables to the r label-relevant ones.
//!
//! The crate also ships the synthetic ground-truth generator, three baseline
//! scoring methods and the ranking/score metrics used by the benchmark
//! harness in `rci-cli`.

pub mod baselines;
pub mod data;
pub mod error;
pub mod eval;
pub mod io;
pub mod lingam;
pub mod rci;
pub mod rng;
pub mod sem;

pub use data::DataMatrix;
pub use error::{Error, Result};
