//! Agnostic learning from refutation on small Boolean domains.
//!
//! A refuter decides whether labelled samples carry structure correlated with
//! some concept of a class or are pure noise. This crate turns any refuter
//! into a weak agnostic learner by planting a query pair into hybrid samples,
//! boosts it to a strong agnostic learner by relabeling only, and wraps any
//! agnostic learner back into a refuter. Exact full-support oracles and
//! Monte Carlo rate tests check every step.

// `!(a > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boosting;
pub mod distributions;
pub mod domain;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod harness;
pub mod hybrid;
pub mod refuters;

pub use error::{Error, Result};
