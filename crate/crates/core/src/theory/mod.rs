//! Closed-form rate and concentration bounds for the FR estimator.
//!
//! Every big-O constant is exposed as a parameter and defaults to 1. With
//! `N = m + n`, partition parameter `h` and boundary scale
//! `δ = c_delta·h^{d−1}·N^{1/d}`, the bounds use `a_h = h·δ` and
//!
//! ```text
//! C'(ε)      = 8 / (1 − ½(1 − 2a_h/ε)^{−2})           (ε > (4+2√2)·a_h)
//! mean:      C'(ε)·exp(−(t/(2ε))^{d/(d−1)} / (N·C̃)),   C̃ = 8·4^{d/(d−1)}
//! median:    C'(ε)·exp(−t^{d/(d−1)} / (8(4ε)^{d/(d−1)}·N))
//! ```
//!
//! The admissible range for ε starts at `h·a_h = h^{d+1}·N^{1/d}` (for
//! `c_delta = 1`). The bounds assume data supported on the unit cube.

mod epsilon;
mod table2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{num, Table};

pub use epsilon::{optimize_epsilon, variance_like_bound, EpsilonStarResult, VarianceLikeResult};
pub use table2::{table2, table2_table, Table2Comparison, Table2Row, TABLE2_ROWS};

/// Which closed form of `C'(ε)` to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CPrimeForm {
    /// `8(1 − ½(1 − 2a_h/ε)^{−2})^{−1}`.
    #[default]
    Boundary,
    /// `8(1 − c_delta·N^{−2/d}·ε²)^{−2}`, kept for comparison.
    Scaled,
}

/// Inputs shared by the concentration bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub m: u64,
    pub n: u64,
    pub d: usize,
    /// Hölder smoothness, in `(0, 1]`.
    pub eta: f64,
    /// Partition parameter, default 7.
    pub h: f64,
    /// Constant in `δ = c_delta·h^{d−1}·N^{1/d}`.
    pub c_delta: f64,
    /// MST degree constant.
    pub c_d: f64,
    pub c_prime_form: CPrimeForm,
}

impl BoundParams {
    /// Defaults with `N` split as evenly as possible between the classes.
    pub fn with_total(total: u64, d: usize) -> Self {
        Self {
            m: total / 2,
            n: total - total / 2,
            d,
            eta: 1.0,
            h: 7.0,
            c_delta: 1.0,
            c_d: 6.0,
            c_prime_form: CPrimeForm::Boundary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::Domain("sample sizes must be ≥ 1".into()));
        }
        check_d(self.d)?;
        check_eta(self.eta)?;
        if !(self.h >= 2.0) {
            return Err(Error::Domain(format!("h = {} must be ≥ 2", self.h)));
        }
        if !(self.c_delta > 0.0 && self.c_d > 0.0) {
            return Err(Error::Domain("constants must be positive".into()));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        (self.m + self.n) as f64
    }

    /// `δ = c_delta·h^{d−1}·N^{1/d}`.
    pub fn boundary_scale(&self) -> f64 {
        self.c_delta * self.h.powi(self.d as i32 - 1) * self.total().powf(1.0 / self.d as f64)
    }

    /// `a_h = h·δ`.
    pub fn a_h(&self) -> f64 {
        self.h * self.boundary_scale()
    }

    /// Smallest admissible ε, `h·a_h`.
    pub fn epsilon_lower_bound(&self) -> f64 {
        self.h * self.a_h()
    }

    pub fn c_prime(&self, epsilon: f64) -> Result<f64> {
        self.validate()?;
        match self.c_prime_form {
            CPrimeForm::Boundary => c_prime_ratio(epsilon / self.a_h()),
            CPrimeForm::Scaled => {
                let inner = 1.0
                    - self.c_delta * self.total().powf(-2.0 / self.d as f64) * epsilon * epsilon;
                let v = 8.0 / (inner * inner);
                if inner == 0.0 || !v.is_finite() {
                    return Err(Error::Domain(format!("C' undefined at ε = {epsilon}")));
                }
                Ok(v)
            }
        }
    }

    /// Exponent of the bound around the mean (positive number subtracted).
    pub fn mean_exponent(&self, t: f64, epsilon: f64) -> f64 {
        let dd = self.dd();
        (t / (2.0 * epsilon)).powf(dd) / (self.total() * c_tilde(self.d))
    }

    /// Exponent of the bound around the median.
    pub fn median_exponent(&self, t: f64, epsilon: f64) -> f64 {
        let dd = self.dd();
        t.powf(dd) / (8.0 * (4.0 * epsilon).powf(dd) * self.total())
    }

    /// `P(|R − E R| ≥ t)` bound at a given ε.
    pub fn concentration_bound_mean(&self, t: f64, epsilon: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.c_prime(epsilon)? * (-self.mean_exponent(t, epsilon)).exp())
    }

    /// `P(|R − median| ≥ t)` bound at a given ε.
    pub fn concentration_bound_median(&self, t: f64, epsilon: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.c_prime(epsilon)? * (-self.median_exponent(t, epsilon)).exp())
    }

    /// `ln` of the mean bound; `+inf` outside the domain of `C'`.
    pub(crate) fn ln_objective(&self, t: f64, epsilon: f64) -> f64 {
        match self.c_prime(epsilon) {
            Ok(c) if c > 0.0 => {
                let v = c.ln() - self.mean_exponent(t, epsilon);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            }
            _ => f64::INFINITY,
        }
    }

    fn dd(&self) -> f64 {
        let d = self.d as f64;
        d / (d - 1.0)
    }
}

/// `C̃ = 8·4^{d/(d−1)}`.
pub fn c_tilde(d: usize) -> f64 {
    let d = d as f64;
    8.0 * 4f64.powf(d / (d - 1.0))
}

/// `C'` as a function of `k = ε/a_h`, written as `16(k−2)²/(k²−8k+8)`.
fn c_prime_ratio(k: f64) -> Result<f64> {
    let den = k * k - 8.0 * k + 8.0;
    if !(k > 2.0 && den > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!(
            "C' needs ε/a_h > 4+2√2 ≈ 6.83, got {k}"
        )));
    }
    Ok(16.0 * (k - 2.0) * (k - 2.0) / den)
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension {d} must be ≥ 2")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("η = {eta} not in (0, 1]")));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be finite and ≥ 0")));
    }
    Ok(())
}

fn check_total(total: f64) -> Result<()> {
    if !(total >= 1.0 && total.is_finite()) {
        return Err(Error::Domain(format!("N = {total} must be ≥ 1")));
    }
    Ok(())
}

/// Bias rate `N^{−η²/(d(η+1))}`.
pub fn bias_rate(total: f64, d: usize, eta: f64) -> Result<f64> {
    check_total(total)?;
    check_d(d)?;
    check_eta(eta)?;
    Ok(total.powf(-eta * eta / (d as f64 * (eta + 1.0))))
}

/// Bias-optimal partition size `⌊N^{η/(d²(η+1))}⌋`, at least 1.
pub fn optimal_partition(total: f64, d: usize, eta: f64) -> Result<u64> {
    check_total(total)?;
    check_d(d)?;
    check_eta(eta)?;
    let d = d as f64;
    Ok((total.powf(eta / (d * d * (eta + 1.0))).floor() as u64).max(1))
}

/// Variance bound `32·c_d²·q/N` with `q = n/N`.
pub fn variance_bound(m: u64, n: u64, c_d: f64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("sample sizes must be ≥ 1".into()));
    }
    let total = (m + n) as f64;
    Ok(32.0 * c_d * c_d * (n as f64 / total) / total)
}

/// MSE rate `N^{−η²/(d(η+1))} + N^{−1}`.
pub fn mse_rate(total: f64, d: usize, eta: f64) -> Result<f64> {
    Ok(bias_rate(total, d, eta)? + 1.0 / total)
}

/// `7^{d−1}·N^{1−1/d²}`, beyond which convexity of the ε objective is not
/// argued.
pub fn convexity_threshold(total: f64, d: usize) -> Result<f64> {
    check_total(total)?;
    check_d(d)?;
    let df = d as f64;
    Ok(7f64.powi(d as i32 - 1) * total.powf(1.0 - 1.0 / (df * df)))
}

/// MSE rate over a grid of sample sizes and dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct RateSurface {
    pub n_grid: Vec<f64>,
    pub d_grid: Vec<usize>,
    pub eta: f64,
    /// `values[i][j]` is the rate at `n_grid[i]`, `d_grid[j]`.
    pub values: Vec<Vec<f64>>,
}

impl RateSurface {
    /// Long format: one row per `(N, d)` cell.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["N", "d", "eta", "mse_rate"]);
        for (i, &n) in self.n_grid.iter().enumerate() {
            for (j, &d) in self.d_grid.iter().enumerate() {
                t.push(vec![
                    num(n),
                    d.to_string(),
                    num(self.eta),
                    num(self.values[i][j]),
                ]);
            }
        }
        t
    }
}

pub fn mse_rate_surface(n_grid: &[f64], d_grid: &[usize], eta: f64) -> Result<RateSurface> {
    if n_grid.is_empty() || d_grid.is_empty() {
        return Err(Error::InvalidInput("rate grids must be nonempty".into()));
    }
    let values = n_grid
        .iter()
        .map(|&n| d_grid.iter().map(|&d| mse_rate(n, d, eta)).collect())
        .collect::<Result<_>>()?;
    Ok(RateSurface {
        n_grid: n_grid.to_vec(),
        d_grid: d_grid.to_vec(),
        eta,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn bias_rate_values() {
        assert!(rel(bias_rate(1e4, 2, 1.0).unwrap(), 0.1) < 1e-12);
        assert!(rel(bias_rate(1e4, 8, 1.0).unwrap(), 10f64.powf(-0.25)) < 1e-12);
        assert!(bias_rate(10.0, 1, 1.0).is_err());
        assert!(bias_rate(10.0, 2, 1.5).is_err());
        assert!(bias_rate(10.0, 2, 0.0).is_err());
    }

    #[test]
    fn optimal_partition_floor() {
        // 10^4^(1/8) ≈ 3.16
        assert_eq!(optimal_partition(1e4, 2, 1.0).unwrap(), 3);
        assert_eq!(optimal_partition(2.0, 8, 0.1).unwrap(), 1);
    }

    #[test]
    fn variance_bound_values() {
        assert!(rel(variance_bound(500, 500, 6.0).unwrap(), 0.576) < 1e-12);
        let a = variance_bound(50, 50, 2.0).unwrap();
        let b = variance_bound(100, 100, 2.0).unwrap();
        assert!(rel(a, 2.0 * b) < 1e-12);
        assert!(rel(a, 16.0 * 4.0 / 100.0) < 1e-12);
    }

    #[test]
    fn surface_corner_and_trends() {
        let s = mse_rate_surface(&[1.0, 10.0, 100.0], &[2, 3, 4], 1.0).unwrap();
        assert!(s.values[0].iter().all(|&v| v == 2.0));
        for j in 0..3 {
            assert!(s.values[1][j] > s.values[2][j]);
        }
        assert!(s.values[2][0] < s.values[2][1] && s.values[2][1] < s.values[2][2]);
        assert_eq!(s.to_table().rows.len(), 9);
        assert!(mse_rate_surface(&[], &[2], 1.0).is_err());
    }

    #[test]
    fn c_prime_values() {
        let p = BoundParams::with_total(1000, 2);
        let a = p.a_h();
        assert_eq!(p.c_prime(7.0 * a).unwrap(), 400.0);
        assert!(rel(p.c_prime(1e12 * a).unwrap(), 16.0) < 1e-9);
        assert!(p.c_prime(6.8 * a).is_err());
        assert!(p.c_prime(-a).is_err());
        let c = p.c_prime(1.1424e4).unwrap();
        assert!((c - 137.0).abs() < 1.0, "{c}");
        // Closed form agrees with the nested expression.
        let e = 9.3 * a;
        let nested = 8.0 / (1.0 - 0.5 * (1.0 - 2.0 * a / e).powi(-2));
        assert!(rel(p.c_prime(e).unwrap(), nested) < 1e-12);
    }

    #[test]
    fn c_prime_strictly_decreasing() {
        let p = BoundParams::with_total(5000, 3);
        let a = p.a_h();
        let vals: Vec<f64> = (0..50)
            .map(|i| p.c_prime(a * (7.0 + i as f64)).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn main_text_form_is_selectable() {
        let mut p = BoundParams::with_total(1000, 2);
        p.c_prime_form = CPrimeForm::Scaled;
        let e = 2.0 * 1000f64.sqrt();
        // 8(1 − 4)^{−2} = 8/9
        assert!(rel(p.c_prime(e).unwrap(), 8.0 / 9.0) < 1e-12);
    }

    #[test]
    fn lower_bound_matches_power_form() {
        for (d, n) in [(2usize, 1000u64), (4, 10_000), (8, 1200)] {
            let p = BoundParams::with_total(n, d);
            let direct = 7f64.powi(d as i32 + 1) * (n as f64).powf(1.0 / d as f64);
            assert!(rel(p.epsilon_lower_bound(), direct) < 1e-14);
        }
    }

    #[test]
    fn exponent_identity_and_limits() {
        let p = BoundParams::with_total(1000, 3);
        let e = 2.0 * p.epsilon_lower_bound();
        for t in [1e3, 7.7e6, 2e9] {
            let a = p.median_exponent(t, e);
            let b = p.mean_exponent(2.0 * t, e);
            assert!(rel(a, b) < 1e-12);
        }
        assert_eq!(
            p.concentration_bound_mean(0.0, e).unwrap(),
            p.c_prime(e).unwrap()
        );
        assert_eq!(
            p.concentration_bound_median(0.0, e).unwrap(),
            p.c_prime(e).unwrap()
        );
        let lo = p.concentration_bound_median(1e9, e).unwrap();
        let hi = p.concentration_bound_median(1e8, e).unwrap();
        assert!(lo < hi);
        assert!(p.concentration_bound_mean(-1.0, e).is_err());
    }

    #[test]
    fn table_two_first_rows_by_hand() {
        let p = BoundParams::with_total(1000, 2);
        let b = p.concentration_bound_mean(2e7, 1.1424e4).unwrap();
        assert!(rel(b, 0.3439) < 0.01, "{b}");
        let p = BoundParams::with_total(10_000, 4);
        let b = p.concentration_bound_mean(3e10, 1.7746e5).unwrap();
        assert!(rel(b, 0.0895) < 0.01, "{b}");
    }

    #[test]
    fn convexity_threshold_values() {
        let v = convexity_threshold(1000.0, 2).unwrap();
        assert!((v - 7.0 * 1000f64.powf(0.75)).abs() < 1e-9);
        assert!((v - 1244.795).abs() < 1e-2, "{v}");
        assert!(convexity_threshold(2000.0, 2).unwrap() > v);
        assert!(convexity_threshold(1000.0, 3).unwrap() > v);
    }
}
