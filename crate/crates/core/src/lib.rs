//! Data-driven weights for composite indexes from an ensemble of discrete
//! Bayesian networks, plus the rival weighting schemes they are compared
//! against.
//!
//! Pipeline: [`dataset`] → [`learners`] (eleven structure learners) →
//! [`ensemble`] (consensus table, robust network, bootstrap strengths) →
//! [`weights`] → [`index`] (composite index, rankings, rank shifts).
//! [`parameters`] provides CPT fitting and the forward sampler used as a
//! ground-truth simulator.

pub mod citests;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod index;
pub mod learners;
pub mod parameters;
pub mod scoring;
pub mod seed;
pub mod weights;

pub use error::{Error, Result};
