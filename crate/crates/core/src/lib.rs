//! Henze-Penrose divergence estimation with the Friedman-Rafsky statistic.
//!
//! The crate is layered bottom-up:
//!
//! - [`emst`]: exact Euclidean minimum spanning trees.
//! - [`fr`]: the dichotomous-edge count and its partitioned and dual variants.
//! - [`estimator`]: divergence estimates, numerical ground truth, bootstrap.
//! - [`theory`]: closed-form rate and concentration bounds.
//! - [`sim`]: seeded Monte Carlo sweeps.
//! - [`data`]: labelled CSV ingestion.

pub mod data;
pub mod emst;
pub mod error;
pub mod estimator;
pub mod fr;
pub mod report;
pub mod seeds;
pub mod sim;
pub mod theory;

pub use error::{Error, Result};
