//! # gibbs-lab
//!
//! A numerical laboratory for the Gibbs learning rule
//! `P(w|s) ∝ π(w)·exp(−α·f(w,s))` and the exact identity between its
//! expected generalization error and the symmetrized KL information
//! carried from the training set into the hypothesis:
//!
//! ```text
//! gen = (I(W;S) + L(W;S)) / α = I_SKL(W;S) / α
//! ```
//!
//! The crate provides three independent routes to the same quantities so
//! they can be checked against each other at desk scale:
//!
//! - closed forms for the Gaussian mean-estimation problem
//!   ([`gaussian_mean`]),
//! - exact enumeration of finite-alphabet problems ([`estimators`]),
//! - Monte-Carlo estimators fed by exact, Metropolis-Hastings, or
//!   Langevin samplers ([`estimators`], [`samplers`]).
//!
//! [`bounds`] computes the sub-Gaussian and per-sample mutual-information
//! upper bounds so they can be compared against the exact values.
//!
//! All randomness flows through explicitly seeded streams ([`seed`]);
//! every function is deterministic given its inputs and stream.

use thiserror::Error;

pub mod bounds;
pub mod estimators;
pub mod gaussian_mean;
pub mod model;
pub mod samplers;
pub mod seed;

mod quad;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pmf does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("Monte Carlo budget too small: need at least {min}, got {got}")]
    BudgetTooSmall { min: usize, got: usize },

    #[error("exact evaluation is not available for this model/loss combination")]
    ExactUnavailable,

    #[error("state space too large: {size} states exceeds cap {cap}")]
    StateSpaceTooLarge { size: u128, cap: u128 },

    #[error("no proposal was accepted over the whole run; proposal scale is pathological")]
    ZeroAcceptance,

    #[error("chain diverged (coordinate norm exceeded {0:e}); reduce the step size")]
    Diverged(f64),

    #[error("argument outside domain: {0}")]
    OutOfDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
