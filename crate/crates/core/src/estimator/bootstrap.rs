//! Percentile bootstrap for the FR statistic.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::DivergenceEstimate;
use crate::emst::PointCloud;
use crate::error::{Error, Result};
use crate::fr::{fr_statistic, LabeledPointSet};
use crate::seeds::stream;

pub const MIN_TRIALS: usize = 100;

/// Redraws allowed per trial when a resampled class collapses to one point.
pub const MAX_REDRAWS: u64 = 64;

/// Percentile interval for `R` and the matching interval for the divergence.
///
/// The divergence is decreasing in `R`, so its lower end comes from the upper
/// `R` quantile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BootstrapInterval {
    pub level: f64,
    pub trials: usize,
    pub low: f64,
    pub point: f64,
    pub high: f64,
    pub r_low: f64,
    pub r_point: usize,
    pub r_high: f64,
    pub r_mean: f64,
}

/// Resamples each class with replacement `trials` times.
///
/// Quantiles use linear interpolation between order statistics.
pub fn bootstrap_interval(
    sample: &LabeledPointSet,
    trials: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapInterval> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidInput(format!(
            "bootstrap needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("level {level} not in (0,1)")));
    }
    let x_varied = has_distinct(sample.x());
    let y_varied = has_distinct(sample.y());

    let mut rs: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            for redraw in 0..MAX_REDRAWS {
                let mut rng = stream(seed, &[t, redraw]);
                let x = resample(sample.x(), &mut rng)?;
                let y = resample(sample.y(), &mut rng)?;
                if (x_varied && !has_distinct(&x)) || (y_varied && !has_distinct(&y)) {
                    continue;
                }
                let s = LabeledPointSet::new(x, y)?;
                return Ok(fr_statistic(&s).r_statistic as f64);
            }
            Err(Error::Data(format!(
                "bootstrap trial {t} collapsed a class {MAX_REDRAWS} times"
            )))
        })
        .collect::<Result<_>>()?;

    let r_mean = rs.iter().sum::<f64>() / rs.len() as f64;
    rs.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let r_low = quantile(&rs, tail);
    let r_high = quantile(&rs, 1.0 - tail);
    let (m, n) = (sample.m(), sample.n());
    let point = DivergenceEstimate::from_counts(fr_statistic(sample).r_statistic, m, n)?;
    let to_d = |r: f64| {
        let (m, n) = (m as f64, n as f64);
        (1.0 - r * (m + n) / (2.0 * m * n)).clamp(0.0, 1.0)
    };
    Ok(BootstrapInterval {
        level,
        trials,
        low: to_d(r_high),
        point: point.d_hat,
        high: to_d(r_low),
        r_low,
        r_point: point.r_statistic,
        r_high,
        r_mean,
    })
}

fn has_distinct(cloud: &PointCloud) -> bool {
    let first = cloud.point(0);
    cloud.points().any(|p| p != first)
}

fn resample(cloud: &PointCloud, rng: &mut impl Rng) -> Result<PointCloud> {
    let k = cloud.len();
    let picks: Vec<usize> = (0..k).map(|_| rng.random_range(0..k)).collect();
    cloud.select(&picks)
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
