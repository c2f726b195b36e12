//! Reference-based optimistic policy optimization on tabular episodic MDPs.
//!
//! The crate bundles the environment model ([`mdp`]), exact dynamic
//! programming oracles ([`dp`]), the learners ([`agent`]), the analysis
//! diagnostics ([`diagnostics`]) and the batch experiment runner
//! ([`experiment`]).

pub mod agent;
pub mod bonus;
pub mod diagnostics;
pub mod dims;
pub mod dp;
mod error;
pub mod experiment;
pub mod mdp;
pub mod model;
pub mod policy;

pub use error::{Error, Result};
