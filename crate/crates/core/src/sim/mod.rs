//! Seeded Monte Carlo sweeps of the estimator.
//!
//! Every draw is addressed by a counter path under the master seed: trial `k`
//! at grid index `i` samples X from stream `[i, k, 0]` and Y from `[i, k, 1]`.
//! Trials run in parallel and are reduced in trial order, so reports do not
//! depend on the worker count.

mod structure;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emst::PointCloud;
use crate::error::{Error, Result};
use crate::estimator::{
    estimate_divergence, true_hp_divergence, Density, DensityModel, Model, OracleConfig,
};
use crate::fr::LabeledPointSet;
use crate::report::{num, Table};
use crate::seeds::{derive_seed, label_hash, stream};
use crate::theory::bias_rate;

pub use structure::{
    subadditivity_spot_check, verify_structure, SpotCheckRow, StructureConfig, StructureReport,
    StructureRow,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where the true divergence comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum TruthSource {
    /// Importance-sampled integral with the experiment's oracle settings.
    #[default]
    Oracle,
    /// A known value, e.g. a frozen high-precision run.
    Fixed { value: f64, std_error: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_label")]
    pub label: String,
    pub f0: DensityModel,
    pub f1: DensityModel,
    /// Share of the `2N` points drawn from `f0`.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Per-class sample sizes `N`; each trial draws `2N` points in total.
    #[serde(default = "default_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Hölder smoothness for the theory overlay.
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub truth: TruthSource,
    #[serde(default)]
    pub oracle: OracleConfig,
}

fn default_label() -> String {
    "experiment".into()
}
fn default_p() -> f64 {
    0.5
}
fn default_grid() -> Vec<usize> {
    (1..=8).map(|k| 100 * k).collect()
}
fn default_trials() -> usize {
    100
}
fn default_eta() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn new(label: impl Into<String>, f0: DensityModel, f1: DensityModel) -> Self {
        Self {
            label: label.into(),
            f0,
            f1,
            p: default_p(),
            n_grid: default_grid(),
            trials: default_trials(),
            seed: 0,
            eta: default_eta(),
            truth: TruthSource::Oracle,
            oracle: OracleConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be ≥ 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::Config("n_grid must be nonempty and positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Config(format!("p = {} not in (0,1)", self.p)));
        }
        if self.f0.dim() != self.f1.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.f0.dim(),
                found: self.f1.dim(),
            });
        }
        Ok(())
    }

    /// Class sizes `(m, n)` for per-class size `size`.
    pub fn class_sizes(&self, size: usize) -> (usize, usize) {
        let total = 2 * size;
        let m = ((total as f64 * self.p).round() as usize).clamp(1, total - 1);
        (m, total - m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    /// Per-class size from the grid.
    pub size: usize,
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    pub mean_d_hat: f64,
    pub empirical_bias: f64,
    pub bias_se: f64,
    /// Population variance over trials, so `mse = bias² + variance`.
    pub empirical_variance: f64,
    pub empirical_mse: f64,
    pub mse_se: f64,
    pub mean_r: f64,
    /// Population variance of `R/(m+n)`.
    pub variance_r_normalized: f64,
    pub theory_mse: f64,
    pub oracle_truth: f64,
    pub oracle_se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum ReportStatus {
    Complete,
    Partial { error: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentMetadata {
    pub version: String,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub metadata: ExperimentMetadata,
    pub status: ReportStatus,
    pub rows: Vec<ExperimentRow>,
}

const COLUMNS: [&str; 16] = [
    "label",
    "size",
    "m",
    "n",
    "trials",
    "mean_d_hat",
    "empirical_bias",
    "bias_se",
    "empirical_variance",
    "empirical_mse",
    "mse_se",
    "mean_r",
    "variance_r_normalized",
    "theory_mse",
    "oracle_truth",
    "oracle_se",
];

impl ExperimentReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(COLUMNS);
        for r in &self.rows {
            t.push(vec![
                self.metadata.config.label.clone(),
                r.size.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                r.trials.to_string(),
                num(r.mean_d_hat),
                num(r.empirical_bias),
                num(r.bias_se),
                num(r.empirical_variance),
                num(r.empirical_mse),
                num(r.mse_se),
                num(r.mean_r),
                num(r.variance_r_normalized),
                num(r.theory_mse),
                num(r.oracle_truth),
                num(r.oracle_se),
            ]);
        }
        t
    }

    /// One-line description for the CSV comment.
    pub fn metadata_line(&self) -> String {
        let cfg = serde_json::to_string(&self.metadata.config).expect("config serialises");
        format!("hpdiv {} config={}", self.metadata.version, cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn is_complete(&self) -> bool {
        self.status == ReportStatus::Complete
    }
}

/// Draws `count` points from `model` with the stream `seed`.
pub fn sample(model: &DensityModel, count: usize, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::InvalidInput("sample count must be ≥ 1".into()));
    }
    let built = model.build()?;
    draw(&built, count, seed, &[])
}

fn draw(model: &Model, count: usize, seed: u64, path: &[u64]) -> Result<PointCloud> {
    let d = model.dim();
    let mut rng = stream(seed, path);
    let mut coords = vec![0.0; count * d];
    for chunk in coords.chunks_mut(d) {
        model.sample_into(&mut rng, chunk);
    }
    PointCloud::new(d, coords)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / k;
    (mean, var)
}

/// Runs every grid size for `config.trials` seeded repetitions.
///
/// A failing oracle yields a report with status `Partial` and no rows.
pub fn run_mse_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let f0 = config.f0.build()?;
    let f1 = config.f1.build()?;
    let metadata = ExperimentMetadata {
        version: VERSION.into(),
        config: config.clone(),
    };

    let truth = if config.f0 == config.f1 {
        Ok((0.0, 0.0))
    } else {
        match config.truth {
            TruthSource::Fixed { value, std_error } => Ok((value, std_error)),
            TruthSource::Oracle => true_hp_divergence(&f0, &f1, config.p, &config.oracle)
                .map(|o| (o.value, o.std_error)),
        }
    };
    let (truth, truth_se) = match truth {
        Ok(t) => t,
        Err(e) => {
            return Ok(ExperimentReport {
                metadata,
                status: ReportStatus::Partial {
                    error: e.to_string(),
                },
                rows: Vec::new(),
            })
        }
    };

    let d = config.f0.dim();
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (i, &size) in config.n_grid.iter().enumerate() {
        let (m, n) = config.class_sizes(size);
        let outcomes: Vec<(f64, f64)> = (0..config.trials as u64)
            .into_par_iter()
            .map(|k| -> Result<(f64, f64)> {
                let x = draw(&f0, m, config.seed, &[i as u64, k, 0])?;
                let y = draw(&f1, n, config.seed, &[i as u64, k, 1])?;
                let e = estimate_divergence(&LabeledPointSet::new(x, y)?);
                Ok((e.d_hat, e.r_statistic as f64))
            })
            .collect::<Result<_>>()?;

        let t = outcomes.len() as f64;
        let d_hats: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let r_norm: Vec<f64> = outcomes.iter().map(|o| o.1 / (m + n) as f64).collect();
        let (mean_d_hat, variance) = mean_var(&d_hats);
        let sq: Vec<f64> = d_hats.iter().map(|v| (v - truth) * (v - truth)).collect();
        let (mse, sq_var) = mean_var(&sq);
        let (mean_rn, var_rn) = mean_var(&r_norm);
        let total = (m + n) as f64;
        rows.push(ExperimentRow {
            size,
            m,
            n,
            trials: config.trials,
            mean_d_hat,
            empirical_bias: mean_d_hat - truth,
            bias_se: (variance / t).sqrt(),
            empirical_variance: variance,
            empirical_mse: mse,
            mse_se: (sq_var / t).sqrt(),
            mean_r: mean_rn * total,
            variance_r_normalized: var_rn,
            theory_mse: bias_rate(total, d, config.eta)
                .map(|b| b * b + 1.0 / total)
                .unwrap_or(f64::NAN),
            oracle_truth: truth,
            oracle_se: truth_se,
        });
    }
    Ok(ExperimentReport {
        metadata,
        status: ReportStatus::Complete,
        rows,
    })
}

/// Null experiments (`f0 = f1`) for the three density families in `dim`.
///
/// Each configuration's seed is `derive_seed(master, [fnv1a(label)])`.
pub fn null_comparison_configs(
    dim: usize,
    n_grid: &[usize],
    trials: usize,
    master_seed: u64,
) -> Vec<ExperimentConfig> {
    [
        ("gaussian", DensityModel::standard_gaussian(dim)),
        ("gamma_copula", DensityModel::gamma_copula(dim)),
        ("student_t", DensityModel::student_t(dim)),
    ]
    .into_iter()
    .map(|(label, model)| {
        let mut c = ExperimentConfig::new(label, model.clone(), model);
        c.n_grid = n_grid.to_vec();
        c.trials = trials;
        c.seed = derive_seed(master_seed, &[label_hash(label)]);
        c
    })
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub reports: Vec<ExperimentReport>,
}

impl ComparisonReport {
    /// All curves in one table, distinguished by the `label` column.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(COLUMNS);
        for r in &self.reports {
            t.extend(r.to_table());
        }
        t
    }

    pub fn metadata_line(&self) -> String {
        let labels: Vec<String> = self
            .reports
            .iter()
            .map(|r| format!("{}:{}", r.metadata.config.label, r.metadata.config.seed))
            .collect();
        format!("hpdiv {VERSION} comparison seeds={}", labels.join(","))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Runs null experiments in order; every configuration needs `f0 == f1`.
pub fn run_distribution_comparison(configs: &[ExperimentConfig]) -> Result<ComparisonReport> {
    if let Some(c) = configs.iter().find(|c| c.f0 != c.f1) {
        return Err(Error::Config(format!(
            "comparison '{}' needs identical f0 and f1",
            c.label
        )));
    }
    let reports = configs
        .iter()
        .map(run_mse_experiment)
        .collect::<Result<_>>()?;
    Ok(ComparisonReport { reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(f0: DensityModel, f1: DensityModel) -> ExperimentConfig {
        let mut c = ExperimentConfig::new("t", f0, f1);
        c.n_grid = vec![20, 40];
        c.trials = 12;
        c.seed = 5;
        c.oracle.samples = 20_000;
        c
    }

    #[test]
    fn null_truth_and_mse_is_mean_square() {
        let g = DensityModel::standard_gaussian(2);
        let rep = run_mse_experiment(&small(g.clone(), g)).unwrap();
        assert!(rep.is_complete());
        for r in &rep.rows {
            assert_eq!(r.oracle_truth, 0.0);
            let direct = r.mean_d_hat * r.mean_d_hat + r.empirical_variance;
            assert!((r.empirical_mse - direct).abs() <= 1e-12 * r.empirical_mse.max(1e-300));
        }
    }

    #[test]
    fn decomposition_with_nonzero_truth() {
        let rep = run_mse_experiment(&small(
            DensityModel::standard_gaussian(2),
            DensityModel::shifted_gaussian(2, 1.0),
        ))
        .unwrap();
        for r in &rep.rows {
            let direct = r.empirical_bias * r.empirical_bias + r.empirical_variance;
            assert!((r.empirical_mse - direct).abs() <= 1e-12 * r.empirical_mse);
            assert!(r.oracle_truth > 0.15 && r.oracle_truth < 0.25);
        }
    }

    #[test]
    fn reports_repeat_exactly() {
        let c = small(DensityModel::student_t(2), DensityModel::gamma_copula(2));
        let a = run_mse_experiment(&c).unwrap();
        let b = run_mse_experiment(&c).unwrap();
        assert_eq!(
            a.to_table()
                .to_csv_string(Some(&a.metadata_line()))
                .unwrap(),
            b.to_table()
                .to_csv_string(Some(&b.metadata_line()))
                .unwrap()
        );
    }

    #[test]
    fn oracle_failure_gives_partial_report() {
        let mut c = small(
            DensityModel::standard_gaussian(2),
            DensityModel::shifted_gaussian(2, 1.0),
        );
        c.oracle.samples = 1;
        let rep = run_mse_experiment(&c).unwrap();
        assert!(!rep.is_complete() && rep.rows.is_empty());
    }

    #[test]
    fn config_validation_and_toml() {
        let text = r#"
            label = "shift"
            n_grid = [100, 200]
            trials = 5
            seed = 9
            f0 = { kind = "gaussian", mean = [0.0, 0.0] }
            f1 = { kind = "gaussian", mean = [1.0, 0.0] }
            truth = { source = "fixed", value = 0.204, std_error = 0.0 }
        "#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.n_grid, vec![100, 200]);
        assert_eq!(
            c.truth,
            TruthSource::Fixed {
                value: 0.204,
                std_error: 0.0
            }
        );
        assert_eq!(c.oracle, OracleConfig::default());
        assert!(
            ExperimentConfig::from_toml_str(&text.replace("[100, 200]", "[200, 100]")).is_err()
        );
        assert!(
            ExperimentConfig::from_toml_str(&text.replace("trials = 5", "trials = 0")).is_err()
        );
        assert!(ExperimentConfig::from_toml_str(&format!("{text}\nbogus = 1")).is_err());
        let mut odd = c.clone();
        odd.p = 0.25;
        assert_eq!(odd.class_sizes(100), (50, 150));
    }

    #[test]
    fn comparison_requires_null_configs() {
        let mut cfgs = null_comparison_configs(2, &[20, 40], 4, 1);
        assert_eq!(cfgs.len(), 3);
        let seeds: Vec<u64> = cfgs.iter().map(|c| c.seed).collect();
        assert!(seeds[0] != seeds[1] && seeds[1] != seeds[2]);
        let rep = run_distribution_comparison(&cfgs).unwrap();
        assert_eq!(rep.to_table().rows.len(), 6);
        assert!(rep
            .reports
            .iter()
            .all(|r| r.rows.iter().all(|x| x.oracle_truth == 0.0)));
        cfgs[0].f1 = DensityModel::shifted_gaussian(2, 1.0);
        assert!(run_distribution_comparison(&cfgs).is_err());
    }

    #[test]
    fn sampling_contract() {
        let g = DensityModel::shifted_gaussian(2, 1.0);
        let a = sample(&g, 10, 3).unwrap();
        assert_eq!(a, sample(&g, 10, 3).unwrap());
        assert_ne!(a, sample(&g, 10, 4).unwrap());
        assert!(sample(&g, 0, 3).is_err());
        let big = sample(&g, 100_000, 1).unwrap();
        let mean: Vec<f64> = (0..2)
            .map(|k| big.points().map(|p| p[k]).sum::<f64>() / 100_000.0)
            .collect();
        assert!((mean[0] - 1.0).abs() < 0.01 && mean[1].abs() < 0.01);
    }
}
