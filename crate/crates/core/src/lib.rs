//! Quantum discord, classical correlations and mutual information between
//! an electron spin and a bath of nuclear spins-1/2 after free induction
//! decay or a two-pulse spin echo, at high temperature.
//!
//! [`correlations`] evaluates the closed-form quadratic-order expressions,
//! [`oracle`] recomputes everything from dense density matrices for small
//! baths, and [`sweep`] and [`io`] drive one-dimensional parameter studies
//! and their CSV/JSON output.

pub mod correlations;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    derive_branch, BranchParams, ExperimentConfig, NuclearSpinParam, SequenceKind, SpinBath,
};
