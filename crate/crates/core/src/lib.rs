//! Byzantine-resilient online distributed gradient descent.
//!
//! Regular agents hold scalar states, exchange them with neighbors, discard
//! the `F` largest and `F` smallest received values and average the rest
//! before taking a gradient step on a locally revealed strongly convex cost.
//! The crate simulates that protocol against Byzantine neighbors, rebuilds
//! the equivalent row-stochastic dynamics over regular agents, and measures
//! regret against the weighted hindsight optimum.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod costs;
pub mod equivalence;
pub mod error;
pub mod graph;
pub mod harness;
pub mod par;
pub mod protocol;
pub mod regret;
pub mod seed;

pub use error::{Error, Result};
pub use par::Exec;
