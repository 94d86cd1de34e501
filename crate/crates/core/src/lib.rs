//! Parametric quantum channels: dense density-matrix simulation, channel
//! representations (Kraus, Stinespring, convex ensembles), trace-distance
//! based channel costs, and min-max optimization of channel parameters
//! against worst-case inputs.

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod minmax;
pub mod noise;
pub mod rng;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
