//! `hpdiv` command-line front end.
//!
//! Exit codes: 0 success, 1 data or computation error, 2 usage error,
//! 3 structural inequality violated. `HPDIV_THREADS` caps the worker pool.

mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command, DatasetArgs};
use hpdiv::data::{feature_sweep, feature_sweep_table, load_labeled_csv};
use hpdiv::estimator::{
    bootstrap_interval, estimate_divergence, DensityModel, SHIFTED_GAUSSIAN_HP,
    SHIFTED_GAUSSIAN_HP_SE,
};
use hpdiv::report::{num, Table};
use hpdiv::sim::{
    null_comparison_configs, run_distribution_comparison, run_mse_experiment, verify_structure,
    ExperimentConfig, StructureConfig, TruthSource,
};
use hpdiv::theory::{
    bias_rate, convexity_threshold, mse_rate, mse_rate_surface, optimal_partition,
    optimize_epsilon, table2, table2_table, variance_bound, variance_like_bound, BoundParams,
};

pub const THREADS_ENV: &str = "HPDIV_THREADS";

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] hpdiv::Error),
    #[error("{0}")]
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Lib(hpdiv::Error::Config(_)) => 2,
            Failure::Lib(_) => 1,
            Failure::Violation(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Usage(format!("{THREADS_ENV}={raw:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn metadata() -> String {
    let flags: Vec<String> = std::env::args().skip(1).collect();
    format!("hpdiv {} {}", env!("CARGO_PKG_VERSION"), flags.join(" "))
}

fn emit(cli: &Cli, table: &Table, extra: Option<&str>) -> Result<(), Failure> {
    let mut meta = metadata();
    if let Some(x) = extra {
        let x = x
            .strip_prefix(concat!("hpdiv ", env!("CARGO_PKG_VERSION"), " "))
            .unwrap_or(x);
        meta.push_str(" | ");
        meta.push_str(x);
    }
    match &cli.output {
        Some(path) => table.write_csv(
            std::fs::File::create(path).map_err(hpdiv::Error::from)?,
            Some(&meta),
        )?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock, Some(&meta))?;
            lock.flush().map_err(hpdiv::Error::from)?;
        }
    }
    Ok(())
}

fn sidecar(cli: &Cli, json: &str) -> Result<(), Failure> {
    if let Some(path) = &cli.output {
        std::fs::write(sidecar_path(path), json).map_err(hpdiv::Error::from)?;
    }
    Ok(())
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Estimate {
            data,
            bootstrap,
            level,
        } => {
            let sample = load_labeled_csv(&data.spec(seed)?)?;
            let e = estimate_divergence(&sample);
            let mut header = vec!["m", "n", "R", "d_hat_raw", "d_hat", "a_hat"];
            let mut row = vec![
                e.m.to_string(),
                e.n.to_string(),
                e.r_statistic.to_string(),
                num(e.d_hat_raw),
                num(e.d_hat),
                num(e.a_hat),
            ];
            if let Some(trials) = bootstrap {
                let b = bootstrap_interval(&sample, *trials, *level, seed)?;
                header.extend(["low", "point", "high"]);
                row.extend([num(b.low), num(b.point), num(b.high)]);
            }
            let mut t = Table::new(header);
            t.push(row);
            emit(cli, &t, None)
        }
        Command::Simulate(s) => {
            let mut cfg = match &cli.config {
                Some(path) => ExperimentConfig::from_path(path)?,
                None => {
                    let mut c = ExperimentConfig::new(
                        "shifted_gaussian",
                        DensityModel::standard_gaussian(s.dim),
                        DensityModel::shifted_gaussian(s.dim, s.shift),
                    );
                    if s.shift == 1.0 && !s.oracle {
                        c.truth = TruthSource::Fixed {
                            value: SHIFTED_GAUSSIAN_HP,
                            std_error: SHIFTED_GAUSSIAN_HP_SE,
                        };
                    }
                    c
                }
            };
            if let Some(grid) = &s.grid {
                cfg.n_grid = grid.clone();
            }
            if let Some(trials) = s.trials {
                cfg.trials = trials;
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(samples) = s.oracle_samples {
                cfg.oracle.samples = samples;
            }
            let report = run_mse_experiment(&cfg)?;
            emit(cli, &report.to_table(), Some(&report.metadata_line()))?;
            sidecar(cli, &report.to_json())?;
            match &report.status {
                hpdiv::sim::ReportStatus::Complete => Ok(()),
                hpdiv::sim::ReportStatus::Partial { error } => {
                    Err(hpdiv::Error::Oracle(format!("partial report: {error}")).into())
                }
            }
        }
        Command::CompareDists { dim, grid, trials } => {
            let configs = null_comparison_configs(*dim, grid, *trials, seed);
            let report = run_distribution_comparison(&configs)?;
            emit(cli, &report.to_table(), Some(&report.metadata_line()))?;
            sidecar(cli, &report.to_json())
        }
        Command::Bounds {
            total,
            dim,
            eta,
            c_d,
            delta,
        } => {
            let n = *total as f64;
            let mut header = vec![
                "N",
                "d",
                "eta",
                "bias_rate",
                "variance_bound",
                "mse_rate",
                "optimal_partition",
                "convexity_threshold",
                "epsilon_lower_bound",
            ];
            let params = BoundParams {
                c_d: *c_d,
                eta: *eta,
                ..BoundParams::with_total(*total, *dim)
            };
            let mut row = vec![
                total.to_string(),
                dim.to_string(),
                num(*eta),
                num(bias_rate(n, *dim, *eta)?),
                num(variance_bound(total / 2, total - total / 2, *c_d)?),
                num(mse_rate(n, *dim, *eta)?),
                optimal_partition(n, *dim, *eta)?.to_string(),
                num(convexity_threshold(n, *dim)?),
                num(params.epsilon_lower_bound()),
            ];
            if let Some(delta) = delta {
                let v = variance_like_bound(&params, *delta)?;
                header.extend([
                    "delta",
                    "t",
                    "t_over_n",
                    "epsilon_star",
                    "converged",
                    "vacuous",
                ]);
                row.extend([
                    num(*delta),
                    num(v.t),
                    num(v.normalized(&params)),
                    num(v.epsilon_star),
                    v.converged.to_string(),
                    v.vacuous.to_string(),
                ]);
            }
            let mut t = Table::new(header);
            t.push(row);
            emit(cli, &t, None)
        }
        Command::EpsilonStar { total, dim, t, h } => {
            let params = BoundParams {
                h: *h,
                ..BoundParams::with_total(*total, *dim)
            };
            let r = optimize_epsilon(&params, *t)?;
            let mut table = Table::new([
                "d",
                "N",
                "t",
                "lower_bound",
                "epsilon_star",
                "bound",
                "c_prime",
                "at_boundary",
                "unimodal_scan",
                "above_convexity_threshold",
            ]);
            table.push(vec![
                dim.to_string(),
                total.to_string(),
                num(r.t),
                num(r.lower_bound),
                num(r.epsilon_star),
                num(r.objective_value),
                num(r.c_prime),
                r.at_boundary.to_string(),
                r.unimodal_scan.to_string(),
                r.above_convexity_threshold.to_string(),
            ]);
            emit(cli, &table, None)
        }
        Command::Table2 => emit(cli, &table2_table(&table2()?), None),
        Command::Heatmap {
            n_grid,
            d_grid,
            eta,
        } => {
            let n: Vec<f64> = n_grid.iter().map(|&v| v as f64).collect();
            emit(cli, &mse_rate_surface(&n, d_grid, *eta)?.to_table(), None)
        }
        Command::FeatureSweep { data, max_dim } => {
            let sample = load_labeled_csv(&data.spec(seed)?)?;
            let depth = max_dim.unwrap_or(sample.dim());
            emit(
                cli,
                &feature_sweep_table(&feature_sweep(&sample, depth)?),
                None,
            )
        }
        Command::VerifyStructure {
            trials,
            dims,
            sizes,
        } => {
            let cfg = StructureConfig {
                trials: *trials,
                dims: dims.clone(),
                sizes: args::expand_sizes(sizes).map_err(Failure::Usage)?,
                seed,
                ..Default::default()
            };
            let report = verify_structure(&cfg)?;
            emit(cli, &report.to_table(), None)?;
            let failing = report.failing_seeds();
            if failing.is_empty() {
                Ok(())
            } else {
                let list: Vec<String> = failing.iter().map(u64::to_string).collect();
                Err(Failure::Violation(format!(
                    "{} violated checks; failing instance seeds: {}",
                    report.violations().count(),
                    list.join(",")
                )))
            }
        }
    }
}

impl DatasetArgs {
    fn spec(&self, seed: u64) -> Result<hpdiv::data::DatasetSpec, Failure> {
        args::dataset_spec(self, seed).map_err(Failure::Usage)
    }
}
