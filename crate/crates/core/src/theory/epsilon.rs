//! Minimising the mean concentration bound over ε, and inverting it.
//!
//! The search works on `ln ε` and the log of the bound. A scan of 200
//! log-spaced points over `[lb, 10⁶·lb]` picks the bracket around the best
//! grid point, then golden-section search narrows it to 10⁻⁸ relative width.
//! Points outside the domain of `C'` count as `+inf`.

use serde::Serialize;

use super::{c_tilde, convexity_threshold, BoundParams};
use crate::error::{Error, Result};

const SCAN_POINTS: usize = 200;
const SPAN: f64 = 1e6;
const REL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsilonStarResult {
    pub t: f64,
    pub epsilon_star: f64,
    pub lower_bound: f64,
    /// The minimised bound.
    pub objective_value: f64,
    pub c_prime: f64,
    /// ε* equals the lower bound to within the search tolerance.
    pub at_boundary: bool,
    /// The coarse scan showed at most one local minimum.
    pub unimodal_scan: bool,
    /// t exceeds the threshold below which convexity is argued.
    pub above_convexity_threshold: bool,
}

/// Minimises the mean concentration bound over `ε ≥ h·a_h`.
pub fn optimize_epsilon(params: &BoundParams, t: f64) -> Result<EpsilonStarResult> {
    params.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let lb = params.epsilon_lower_bound();
    let (u0, u1) = (lb.ln(), (lb * SPAN).ln());
    let f = |u: f64| params.ln_objective(t, u.exp());

    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            if i == 0 {
                u0
            } else {
                u0 + (u1 - u0) * i as f64 / (SCAN_POINTS - 1) as f64
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&u| f(u)).collect();
    let best = (0..SCAN_POINTS)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("nonempty scan");
    if vals[best] == f64::INFINITY {
        return Err(Error::Domain(format!(
            "bound undefined on the whole ε range starting at {lb}"
        )));
    }

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(SCAN_POINTS - 1)];
    let u_gold = golden_section(&f, lo, hi);
    // Golden section never evaluates the bracket ends; compare them too.
    let u_star = [u_gold, lo, hi, grid[best]]
        .into_iter()
        .min_by(|&a, &b| f(a).total_cmp(&f(b)))
        .expect("candidates");
    let epsilon_star = if u_star == u0 { lb } else { u_star.exp() };

    Ok(EpsilonStarResult {
        t,
        epsilon_star,
        lower_bound: lb,
        objective_value: params.concentration_bound_mean(t, epsilon_star)?,
        c_prime: params.c_prime(epsilon_star)?,
        at_boundary: (epsilon_star - lb).abs() <= 10.0 * REL_TOL * lb,
        unimodal_scan: local_minima(&vals) <= 1,
        above_convexity_threshold: t > convexity_threshold(params.total(), params.d)?,
    })
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    // Widths are in ln ε, so this is a relative tolerance on ε.
    while (b - a).abs() > REL_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Strict interior local minima, ignoring differences at rounding level.
fn local_minima(vals: &[f64]) -> usize {
    let mut signs = Vec::with_capacity(vals.len());
    for w in vals.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        let diff = b - a;
        if diff.abs() > 1e-12 * (a.abs() + b.abs() + 1.0) {
            signs.push(diff.signum());
        }
    }
    signs
        .windows(2)
        .filter(|w| w[0] < 0.0 && w[1] > 0.0)
        .count()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceLikeResult {
    pub delta: f64,
    /// Deviation at which the mean bound equals `delta`.
    pub t: f64,
    /// The ε used in the final inversion.
    pub epsilon_star: f64,
    pub c_prime: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `delta ≥ C'(ε*)`: every `t ≥ 0` already meets the level.
    pub vacuous: bool,
}

impl VarianceLikeResult {
    /// `t/N`, the deviation on the scale of `R/N`.
    pub fn normalized(&self, params: &BoundParams) -> f64 {
        self.t / params.total()
    }
}

/// Solves `bound_mean(t, ε*(t)) = delta` for `t` by fixed-point iteration.
///
/// Each step inverts the bound at the current ε,
/// `t = 2ε·(N·C̃·ln(C'(ε)/δ))^{(d−1)/d}`, then re-optimises ε at that `t`.
/// Iteration stops at relative change below 10⁻⁶ or after 100 steps.
pub fn variance_like_bound(params: &BoundParams, delta: f64) -> Result<VarianceLikeResult> {
    params.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("δ = {delta} not in (0,1)")));
    }
    let d = params.d as f64;
    let invert = |eps: f64| -> Result<Option<(f64, f64)>> {
        let c = params.c_prime(eps)?;
        let log_ratio = (c / delta).ln();
        if log_ratio <= 0.0 {
            return Ok(None);
        }
        let t = 2.0 * eps * (params.total() * c_tilde(params.d) * log_ratio).powf((d - 1.0) / d);
        Ok(Some((t, c)))
    };

    let mut eps = params.epsilon_lower_bound();
    let Some((mut t, mut c)) = invert(eps)? else {
        return Ok(VarianceLikeResult {
            delta,
            t: 0.0,
            epsilon_star: eps,
            c_prime: params.c_prime(eps)?,
            iterations: 0,
            converged: true,
            vacuous: true,
        });
    };
    for it in 1..=100 {
        eps = optimize_epsilon(params, t)?.epsilon_star;
        let Some((next, c_next)) = invert(eps)? else {
            return Ok(VarianceLikeResult {
                delta,
                t: 0.0,
                epsilon_star: eps,
                c_prime: params.c_prime(eps)?,
                iterations: it,
                converged: true,
                vacuous: true,
            });
        };
        let change = (next - t).abs() / t;
        t = next;
        c = c_next;
        if change < 1e-6 {
            return Ok(VarianceLikeResult {
                delta,
                t,
                epsilon_star: eps,
                c_prime: c,
                iterations: it,
                converged: true,
                vacuous: false,
            });
        }
    }
    Ok(VarianceLikeResult {
        delta,
        t,
        epsilon_star: eps,
        c_prime: c,
        iterations: 100,
        converged: false,
        vacuous: false,
    })
}
