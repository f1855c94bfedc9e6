//! Henze-Penrose divergence estimates from the FR statistic.
//!
//! For class proportions `p = m/(m+n)` and `q = n/(m+n)` the HP divergence is
//!
//! ```text
//! D_p(f0, f1) = 1/(4pq) [ ∫ (p f0 − q f1)² / (p f0 + q f1) dx − (p − q)² ]
//!             = 1 − ∫ f0 f1 / (p f0 + q f1) dx
//! ```
//!
//! and `1 − R·(m+n)/(2mn)` converges to it almost surely. The finite-sample
//! value can be negative, so both the raw and the `[0, 1]`-clamped values are
//! reported.

mod bootstrap;
pub mod density;
mod oracle;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fr::{fr_statistic, LabeledPointSet};

pub use bootstrap::{bootstrap_interval, BootstrapInterval, MAX_REDRAWS, MIN_TRIALS};
pub use density::{Density, DensityModel, Model, UniformBox};
pub use oracle::{
    true_bayes_error, true_hp_divergence, true_hp_integral, OracleConfig, OracleEstimate,
};

/// `D_{1/2}` between `N(0, I)` and `N(e₁, I)` in any dimension, from a
/// 10⁷-draw run of [`true_hp_divergence`] with seed 0.
pub const SHIFTED_GAUSSIAN_HP: f64 = 0.204_027_229_291_275_12;

/// Standard error of [`SHIFTED_GAUSSIAN_HP`].
pub const SHIFTED_GAUSSIAN_HP_SE: f64 = 6.546e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceEstimate {
    pub r_statistic: usize,
    pub m: usize,
    pub n: usize,
    pub p_hat: f64,
    pub q_hat: f64,
    /// `R(m+n)/(2mn)`, the HP-integral estimate.
    pub a_hat: f64,
    /// `1 − a_hat`.
    pub d_hat_raw: f64,
    /// `d_hat_raw` clamped to `[0, 1]`.
    pub d_hat: f64,
}

impl DivergenceEstimate {
    pub fn from_counts(r_statistic: usize, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyClass(if m == 0 { "X" } else { "Y" }));
        }
        let (mf, nf) = (m as f64, n as f64);
        let total = mf + nf;
        let a_hat = r_statistic as f64 * total / (2.0 * mf * nf);
        let d_hat_raw = 1.0 - a_hat;
        Ok(Self {
            r_statistic,
            m,
            n,
            p_hat: mf / total,
            q_hat: nf / total,
            a_hat,
            d_hat_raw,
            d_hat: d_hat_raw.clamp(0.0, 1.0),
        })
    }
}

/// FR statistic of the sample mapped to a divergence estimate.
pub fn estimate_divergence(sample: &LabeledPointSet) -> DivergenceEstimate {
    let fr = fr_statistic(sample);
    DivergenceEstimate::from_counts(fr.r_statistic, fr.m, fr.n)
        .expect("labelled sets have two nonempty classes")
}
