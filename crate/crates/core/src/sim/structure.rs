//! Random-instance drivers for the structural MST inequalities.
//!
//! Instance `i` has seed `derive_seed(seed, [i])`. Its dimension, size, class
//! split, points (uniform on the unit cube) and one-point move are all drawn
//! from `stream(instance_seed, [])`, so any instance can be replayed from its
//! echoed seed with [`check_instance`].

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::emst::PointCloud;
use crate::error::{Error, Result};
use crate::fr::{
    checks::{dual_sandwich, one_point_move, subadditivity, InequalityCheck},
    partition_fr, DegreeConstant, LabeledPointSet, PartitionOptions,
};
use crate::report::{num, Table};
use crate::seeds::{derive_seed, stream};

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    /// Candidate total sizes `m + n`; each instance picks one uniformly.
    pub sizes: Vec<usize>,
    /// Partition resolutions for the subadditivity check.
    pub partitions: Vec<usize>,
    pub c_d: DegreeConstant,
    pub seed: u64,
}

impl Default for StructureConfig {
    fn default() -> Self {
        Self {
            trials: 500,
            dims: vec![2],
            sizes: (20..=200).collect(),
            partitions: vec![2, 3],
            c_d: DegreeConstant::Auto,
            seed: 0,
        }
    }
}

impl StructureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be ≥ 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Config("dims must be nonempty and positive".into()));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&s| s < 2) {
            return Err(Error::Config("sizes must be nonempty and ≥ 2".into()));
        }
        if self.partitions.contains(&0) {
            return Err(Error::Config("partition resolutions must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureRow {
    pub instance: usize,
    pub instance_seed: u64,
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    pub check: String,
    pub lhs: u64,
    pub rhs: u64,
    pub margin: i128,
}

impl StructureRow {
    pub fn holds(&self) -> bool {
        self.margin >= 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub rows: Vec<StructureRow>,
}

impl StructureReport {
    pub fn violations(&self) -> impl Iterator<Item = &StructureRow> {
        self.rows.iter().filter(|r| !r.holds())
    }

    /// Seeds of instances with at least one violated check, in order.
    pub fn failing_seeds(&self) -> Vec<u64> {
        let mut seeds: Vec<u64> = self.violations().map(|r| r.instance_seed).collect();
        seeds.dedup();
        seeds
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new([
            "instance",
            "instance_seed",
            "d",
            "m",
            "n",
            "check",
            "lhs",
            "rhs",
            "margin",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.instance.to_string(),
                r.instance_seed.to_string(),
                r.dim.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                r.check.clone(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
            ]);
        }
        t
    }
}

fn uniform_cloud(rng: &mut impl Rng, count: usize, d: usize) -> Result<PointCloud> {
    PointCloud::new(d, (0..count * d).map(|_| rng.random::<f64>()).collect())
}

/// Runs every check on the instance generated from `instance_seed`.
pub fn check_instance(
    instance: usize,
    instance_seed: u64,
    cfg: &StructureConfig,
) -> Result<Vec<StructureRow>> {
    let mut rng = stream(instance_seed, &[]);
    let d = cfg.dims[rng.random_range(0..cfg.dims.len())];
    let total = cfg.sizes[rng.random_range(0..cfg.sizes.len())];
    let m = rng.random_range(1..total);
    let x = uniform_cloud(&mut rng, m, d)?;
    let y = uniform_cloud(&mut rng, total - m, d)?;
    let sample = LabeledPointSet::new(x, y)?;
    let index = rng.random_range(0..total);
    let target: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();

    let opts = PartitionOptions::default();
    let mut checks: Vec<(String, InequalityCheck)> = Vec::new();
    for &l in &cfg.partitions {
        checks.push((
            format!("subadditivity l={l}"),
            subadditivity(&sample, l, opts)?,
        ));
    }
    for c in dual_sandwich(&sample, cfg.c_d, opts)? {
        checks.push((c.name.to_string(), c));
    }
    checks.push((
        "one-point move".into(),
        one_point_move(&sample, index, &target, cfg.c_d)?,
    ));

    Ok(checks
        .into_iter()
        .map(|(check, c)| StructureRow {
            instance,
            instance_seed,
            dim: d,
            m,
            n: total - m,
            check,
            lhs: c.lhs,
            rhs: c.rhs,
            margin: c.margin(),
        })
        .collect())
}

/// Runs [`check_instance`] for `cfg.trials` instances in parallel.
pub fn verify_structure(cfg: &StructureConfig) -> Result<StructureReport> {
    cfg.validate()?;
    let per_instance: Vec<Vec<StructureRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| check_instance(i, derive_seed(cfg.seed, &[i as u64]), cfg))
        .collect::<Result<_>>()?;
    Ok(StructureReport {
        rows: per_instance.into_iter().flatten().collect(),
    })
}

/// Monte Carlo summary of the thresholded subadditivity event at one size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpotCheckRow {
    pub dim: usize,
    pub total: usize,
    pub l: usize,
    pub trials: usize,
    /// `h²·h^{d−1}·N^{1/d}`.
    pub epsilon: f64,
    /// Share of instances with `R > Σ R_i + 2ε`.
    pub violation_fraction: f64,
    /// `h·h^{d−1}·N^{1/d} / ε`.
    pub allowed_fraction: f64,
    pub mean_crossing: f64,
    /// `mean |D| / (l^{d−1}·N^{1/d})`.
    pub crossing_ratio: f64,
}

/// Report-only check of the thresholded subadditivity event and the growth
/// of the crossing-edge count, on balanced uniform samples of size `total`.
pub fn subadditivity_spot_check(
    dim: usize,
    total: usize,
    l: usize,
    h: f64,
    trials: usize,
    seed: u64,
) -> Result<SpotCheckRow> {
    if dim == 0 || total < 2 || l == 0 || trials == 0 || !(h > 0.0) {
        return Err(Error::InvalidInput(
            "spot check needs dim, l, trials ≥ 1, total ≥ 2 and h > 0".into(),
        ));
    }
    let d = dim as f64;
    let scale = h.powf(d - 1.0) * (total as f64).powf(1.0 / d);
    let epsilon = h * h * scale;
    let outcomes: Vec<(bool, usize)> = (0..trials as u64)
        .into_par_iter()
        .map(|k| -> Result<(bool, usize)> {
            let mut rng = stream(seed, &[k]);
            let x = uniform_cloud(&mut rng, total / 2, dim)?;
            let y = uniform_cloud(&mut rng, total - total / 2, dim)?;
            let rep = partition_fr(&LabeledPointSet::new(x, y)?, l, PartitionOptions::default())?;
            let violated = rep.global_r as f64 > rep.sum_cell_r() as f64 + 2.0 * epsilon;
            Ok((violated, rep.crossing_edge_count))
        })
        .collect::<Result<_>>()?;
    let k = trials as f64;
    let mean_crossing = outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / k;
    Ok(SpotCheckRow {
        dim,
        total,
        l,
        trials,
        epsilon,
        violation_fraction: outcomes.iter().filter(|o| o.0).count() as f64 / k,
        allowed_fraction: h * scale / epsilon,
        mean_crossing,
        crossing_ratio: mean_crossing / ((l as f64).powf(d - 1.0) * (total as f64).powf(1.0 / d)),
    })
}

impl SpotCheckRow {
    pub fn table(rows: &[SpotCheckRow]) -> Table {
        let mut t = Table::new([
            "d",
            "N",
            "l",
            "trials",
            "epsilon",
            "violation_fraction",
            "allowed_fraction",
            "mean_crossing",
            "crossing_ratio",
        ]);
        for r in rows {
            t.push(vec![
                r.dim.to_string(),
                r.total.to_string(),
                r.l.to_string(),
                r.trials.to_string(),
                num(r.epsilon),
                num(r.violation_fraction),
                num(r.allowed_fraction),
                num(r.mean_crossing),
                num(r.crossing_ratio),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_has_no_violations_and_replays() {
        let cfg = StructureConfig {
            trials: 20,
            sizes: (20..=60).collect(),
            dims: vec![2, 3],
            ..Default::default()
        };
        let rep = verify_structure(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 20 * 5);
        assert_eq!(rep.violations().count(), 0);
        assert!(rep.failing_seeds().is_empty());
        let r = &rep.rows[5 * 7];
        let again = check_instance(r.instance, r.instance_seed, &cfg).unwrap();
        assert_eq!(again, rep.rows[35..40].to_vec());
    }

    #[test]
    fn planar_bounds_use_known_constant() {
        let cfg = StructureConfig {
            trials: 4,
            sizes: vec![30],
            ..Default::default()
        };
        let rows = verify_structure(&cfg).unwrap().rows;
        for inst in rows.chunks(5) {
            let r = inst[2].lhs;
            assert_eq!(inst[2].check, "dual lower");
            assert_eq!(inst[3].rhs, r + 24);
            assert_eq!(inst[4].rhs, 24);
        }
    }

    #[test]
    fn rejects_empty_config() {
        let cfg = StructureConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(verify_structure(&cfg).is_err());
    }

    #[test]
    fn spot_check_is_report_only() {
        let row = subadditivity_spot_check(2, 200, 3, 7.0, 10, 1).unwrap();
        assert_eq!(row.violation_fraction, 0.0);
        assert!((row.allowed_fraction - 1.0 / 7.0).abs() < 1e-15);
        assert!(row.mean_crossing > 0.0);
    }
}
