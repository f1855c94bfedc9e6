//! Synthetic densities with log-density evaluation and seeded sampling.

use std::f64::consts::PI;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Gamma, Normal, StudentsT};

use crate::error::{Error, Result};

/// A density on ℝ^d that can be evaluated and sampled.
pub trait Density: Sync {
    fn dim(&self) -> usize;

    /// Natural log of the density; `-inf` outside the support.
    fn ln_pdf(&self, x: &[f64]) -> f64;

    /// Writes one draw into `out` (length `dim`).
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]);
}

/// The distribution families used by the experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityModel {
    /// Identity covariance, given mean.
    Gaussian { mean: Vec<f64> },
    /// Gamma(shape, rate) marginals joined by an equicorrelated Gaussian
    /// copula with correlation `rho`.
    GammaCopula {
        dim: usize,
        #[serde(default = "one")]
        shape: f64,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default = "half")]
        rho: f64,
    },
    /// Independent standard Student-t coordinates.
    StudentT {
        dim: usize,
        #[serde(default = "three")]
        dof: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn three() -> f64 {
    3.0
}

impl DensityModel {
    pub fn standard_gaussian(dim: usize) -> Self {
        DensityModel::Gaussian {
            mean: vec![0.0; dim],
        }
    }

    /// Unit-variance Gaussian shifted by `shift` along the first axis.
    pub fn shifted_gaussian(dim: usize, shift: f64) -> Self {
        let mut mean = vec![0.0; dim];
        mean[0] = shift;
        DensityModel::Gaussian { mean }
    }

    pub fn gamma_copula(dim: usize) -> Self {
        DensityModel::GammaCopula {
            dim,
            shape: 1.0,
            rate: 1.0,
            rho: 0.5,
        }
    }

    pub fn student_t(dim: usize) -> Self {
        DensityModel::StudentT { dim, dof: 3.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            DensityModel::Gaussian { mean } => mean.len(),
            DensityModel::GammaCopula { dim, .. } | DensityModel::StudentT { dim, .. } => *dim,
        }
    }

    /// Checks parameters and precomputes what evaluation needs.
    pub fn build(&self) -> Result<Model> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::InvalidInput("density dimension must be ≥ 1".into()));
        }
        match self {
            DensityModel::Gaussian { mean } => {
                if mean.iter().any(|m| !m.is_finite()) {
                    return Err(Error::InvalidInput("gaussian mean must be finite".into()));
                }
                Ok(Model::Gaussian(GaussianModel { mean: mean.clone() }))
            }
            DensityModel::GammaCopula {
                shape, rate, rho, ..
            } => GammaCopulaModel::new(d, *shape, *rate, *rho).map(Model::GammaCopula),
            DensityModel::StudentT { dof, .. } => {
                let ln = StudentsT::new(0.0, 1.0, *dof)
                    .map_err(|e| Error::InvalidInput(format!("student-t: {e}")))?;
                let draw = StudentT::new(*dof)
                    .map_err(|e| Error::InvalidInput(format!("student-t: {e}")))?;
                Ok(Model::StudentT(StudentTModel { dim: d, ln, draw }))
            }
        }
    }
}

/// A validated [`DensityModel`].
#[derive(Clone, Debug)]
pub enum Model {
    Gaussian(GaussianModel),
    GammaCopula(GammaCopulaModel),
    StudentT(StudentTModel),
}

impl Density for Model {
    fn dim(&self) -> usize {
        match self {
            Model::Gaussian(m) => m.dim(),
            Model::GammaCopula(m) => m.dim(),
            Model::StudentT(m) => m.dim(),
        }
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        match self {
            Model::Gaussian(m) => m.ln_pdf(x),
            Model::GammaCopula(m) => m.ln_pdf(x),
            Model::StudentT(m) => m.ln_pdf(x),
        }
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        match self {
            Model::Gaussian(m) => m.sample_into(rng, out),
            Model::GammaCopula(m) => m.sample_into(rng, out),
            Model::StudentT(m) => m.sample_into(rng, out),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaussianModel {
    mean: Vec<f64>,
}

impl Density for GaussianModel {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        let q: f64 = x
            .iter()
            .zip(&self.mean)
            .map(|(a, m)| (a - m) * (a - m))
            .sum();
        -0.5 * q - 0.5 * self.mean.len() as f64 * (2.0 * PI).ln()
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for (o, m) in out.iter_mut().zip(&self.mean) {
            let z: f64 = StandardNormal.sample(rng);
            *o = m + z;
        }
    }
}

#[derive(Clone, Debug)]
pub struct StudentTModel {
    dim: usize,
    ln: StudentsT,
    draw: StudentT<f64>,
}

impl Density for StudentTModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.ln.ln_pdf(v)).sum()
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for o in out.iter_mut() {
            *o = self.draw.sample(rng);
        }
    }
}

/// Gaussian copula with equicorrelation `rho` over Gamma marginals.
///
/// Any `rho ∈ (-1, 1)` is accepted in two dimensions; above two dimensions
/// `rho ∈ [0, 1)`.
#[derive(Clone, Debug)]
pub struct GammaCopulaModel {
    dim: usize,
    shape: f64,
    rate: f64,
    rho: f64,
    marginal: Gamma,
    normal: Normal,
    /// `ln det Σ`.
    ln_det: f64,
    /// Σ⁻¹ = a·I − b·11ᵀ.
    inv_a: f64,
    inv_b: f64,
}

impl GammaCopulaModel {
    fn new(dim: usize, shape: f64, rate: f64, rho: f64) -> Result<Self> {
        let marginal =
            Gamma::new(shape, rate).map_err(|e| Error::InvalidInput(format!("gamma: {e}")))?;
        let ok = if dim <= 2 {
            rho > -1.0 && rho < 1.0
        } else {
            (0.0..1.0).contains(&rho)
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "copula correlation {rho} unsupported in dimension {dim}"
            )));
        }
        let k = dim as f64;
        let rho_eff = if dim == 1 { 0.0 } else { rho };
        let spread = 1.0 + (k - 1.0) * rho_eff;
        Ok(Self {
            dim,
            shape,
            rate,
            rho: rho_eff,
            marginal,
            normal: Normal::new(0.0, 1.0).expect("standard normal"),
            ln_det: (k - 1.0) * (1.0 - rho_eff).ln() + spread.ln(),
            inv_a: 1.0 / (1.0 - rho_eff),
            inv_b: rho_eff / ((1.0 - rho_eff) * spread),
        })
    }

    /// Normal score of a marginal value, using the tail that keeps precision.
    fn score(&self, x: f64) -> f64 {
        let (cdf, sf) = if self.shape == 1.0 {
            let s = (-self.rate * x).exp();
            (-(-self.rate * x).exp_m1(), s)
        } else {
            (self.marginal.cdf(x), self.marginal.sf(x))
        };
        if cdf < 0.5 {
            self.normal.inverse_cdf(cdf)
        } else {
            -self.normal.inverse_cdf(sf)
        }
    }

    /// Marginal value whose normal score is `z`.
    fn value_at_score(&self, z: f64) -> f64 {
        if self.shape == 1.0 {
            // Survival Φ(−z) = exp(−rate·x).
            -self.normal.cdf(-z).ln() / self.rate
        } else {
            self.marginal.inverse_cdf(self.normal.cdf(z))
        }
    }
}

impl Density for GammaCopulaModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        if x.iter().any(|&v| v <= 0.0) {
            return f64::NEG_INFINITY;
        }
        let mut ln_marg = 0.0;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for &v in x {
            ln_marg += self.marginal.ln_pdf(v);
            let z = self.score(v);
            sum += z;
            sq += z * z;
        }
        // zᵀ(Σ⁻¹ − I)z with Σ⁻¹ = a·I − b·11ᵀ.
        let quad = (self.inv_a - 1.0) * sq - self.inv_b * sum * sum;
        ln_marg - 0.5 * self.ln_det - 0.5 * quad
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        if self.rho >= 0.0 {
            let common: f64 = StandardNormal.sample(rng);
            let (a, b) = (self.rho.sqrt(), (1.0 - self.rho).sqrt());
            for o in out.iter_mut() {
                let w: f64 = StandardNormal.sample(rng);
                *o = self.value_at_score(a * common + b * w);
            }
        } else {
            let z1: f64 = StandardNormal.sample(rng);
            let w: f64 = StandardNormal.sample(rng);
            out[0] = self.value_at_score(z1);
            out[1] = self.value_at_score(self.rho * z1 + (1.0 - self.rho * self.rho).sqrt() * w);
        }
    }
}

/// Uniform density on an axis-aligned box; mostly useful in tests.
#[derive(Clone, Debug)]
pub struct UniformBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    ln_volume: f64,
}

impl UniformBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput(
                "box needs lo < hi on every axis".into(),
            ));
        }
        let ln_volume = lo.iter().zip(&hi).map(|(a, b)| (b - a).ln()).sum();
        Ok(Self { lo, hi, ln_volume })
    }
}

impl Density for UniformBox {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        let inside = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| a <= v && v <= b);
        if inside {
            -self.ln_volume
        } else {
            f64::NEG_INFINITY
        }
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for (o, (a, b)) in out.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *o = a + (b - a) * rng.random::<f64>();
        }
    }
}
