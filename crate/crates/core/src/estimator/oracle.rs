//! Numerical ground truth by importance sampling from the mixture.
//!
//! With `g = p·f0 + q·f1` as the proposal, every target integral becomes an
//! expectation under `g` of a function of the log-ratio
//! `s = ln(p f0) − ln(q f1)`:
//!
//! | quantity | integrand under g |
//! |---|---|
//! | ∫ (p f0 − q f1)² / g | tanh²(s/2) |
//! | ∫ f0 f1 / g | sech²(s/2) / (4pq) |
//! | ∫ min(p f0, q f1) | 1 / (1 + e^{|s|}) |
//!
//! Draws are split into fixed chunks, each with its own seeded stream, and
//! chunk sums are combined in chunk order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::Density;
use crate::error::{Error, Result};
use crate::seeds::stream;

const CHUNK: u64 = 65_536;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub samples: u64,
    pub seed: u64,
    /// Standard errors above this set [`OracleEstimate::se_exceeded`].
    pub max_std_error: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            max_std_error: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub se_exceeded: bool,
}

/// HP divergence `D_p(f0, f1)`.
pub fn true_hp_divergence<A: Density, B: Density>(
    f0: &A,
    f1: &B,
    p: f64,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    let q = 1.0 - p;
    let scale = 1.0 / (4.0 * p * q);
    let offset = (p - q) * (p - q);
    integrate(
        f0,
        f1,
        p,
        cfg,
        |s| (s / 2.0).tanh().powi(2),
        |m| (m - offset) * scale,
        scale,
    )
}

/// HP integral `A_p(f0, f1) = ∫ f0 f1 / (p f0 + q f1)`, equal to `1 − D_p`.
pub fn true_hp_integral<A: Density, B: Density>(
    f0: &A,
    f1: &B,
    p: f64,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    let scale = 1.0 / (4.0 * p * (1.0 - p));
    integrate(f0, f1, p, cfg, |s| sech_sq(s / 2.0), |m| m * scale, scale)
}

/// Bayes error `∫ min(p f0, q f1)`.
pub fn true_bayes_error<A: Density, B: Density>(
    f0: &A,
    f1: &B,
    p: f64,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    integrate(f0, f1, p, cfg, |s| 1.0 / (1.0 + s.abs().exp()), |m| m, 1.0)
}

fn sech_sq(x: f64) -> f64 {
    let c = 1.0 / x.abs().cosh();
    c * c
}

fn integrate<A: Density, B: Density>(
    f0: &A,
    f1: &B,
    p: f64,
    cfg: &OracleConfig,
    integrand: impl Fn(f64) -> f64 + Sync,
    finish: impl Fn(f64) -> f64,
    se_scale: f64,
) -> Result<OracleEstimate> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("mixing proportion {p} not in (0,1)")));
    }
    if f0.dim() != f1.dim() {
        return Err(Error::DimensionMismatch {
            expected: f0.dim(),
            found: f1.dim(),
        });
    }
    if cfg.samples < 2 {
        return Err(Error::Oracle("at least two samples are required".into()));
    }
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let d = f0.dim();
    let chunks = cfg.samples.div_ceil(CHUNK);

    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let mut rng = stream(cfg.seed, &[c]);
            let count = CHUNK.min(cfg.samples - c * CHUNK);
            let mut x = vec![0.0; d];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                if rand::Rng::random::<f64>(&mut rng) < p {
                    f0.sample_into(&mut rng, &mut x);
                } else {
                    f1.sample_into(&mut rng, &mut x);
                }
                let a = ln_p + f0.ln_pdf(&x);
                let b = ln_q + f1.ln_pdf(&x);
                let w = integrand(a - b);
                if !w.is_finite() {
                    return Err(Error::Oracle(format!(
                        "integrand not finite at a sampled point (log terms {a}, {b})"
                    )));
                }
                s1 += w;
                s2 += w * w;
            }
            Ok((s1, s2))
        })
        .collect::<Result<_>>()?;

    let (s1, s2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = cfg.samples as f64;
    let mean = s1 / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let std_error = se_scale * (var / n).sqrt();
    Ok(OracleEstimate {
        value: finish(mean),
        std_error,
        samples: cfg.samples,
        se_exceeded: std_error > cfg.max_std_error,
    })
}
