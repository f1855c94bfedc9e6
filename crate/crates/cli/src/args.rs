use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hpdiv::data::{ColumnRef, DatasetSpec, Duplicates, FeatureSelection, Normalize};

#[derive(Debug, Parser)]
#[command(
    name = "hpdiv",
    version,
    about = "Henze-Penrose divergence estimation and bounds"
)]
pub struct Cli {
    /// Master seed for every random draw (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the CSV here instead of stdout; reports also get a `.json` sidecar.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// TOML experiment configuration for `simulate`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    None,
    UnitCube,
    ZScore,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Label column by header name or 0-based index.
    #[arg(long)]
    pub label_col: String,
    /// The two label values, mapped to X and Y.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub classes: Vec<String>,
    /// Feature columns in order; all other columns when omitted.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    #[arg(long)]
    pub max_rows_per_class: Option<usize>,
    #[arg(long, value_enum, default_value_t = NormalizeArg::None)]
    pub normalize: NormalizeArg,
    /// Single-byte field separator; detected when omitted.
    #[arg(long)]
    pub delimiter: Option<char>,
    /// Columns are addressed by index only.
    #[arg(long)]
    pub no_header: bool,
    /// `keep`, `dedup` or `jitter:<amplitude>`.
    #[arg(long, default_value = "keep")]
    pub duplicates: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Dimension of the built-in shifted-Gaussian experiment.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Mean shift along the first axis.
    #[arg(long, default_value_t = 1.0)]
    pub shift: f64,
    /// Per-class sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Always compute the truth by importance sampling.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub oracle_samples: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the divergence between two classes of a CSV file.
    Estimate {
        #[command(flatten)]
        data: DatasetArgs,
        /// Bootstrap trials for a percentile interval.
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// MSE-versus-N sweep for two densities.
    Simulate(SimulateArgs),
    /// Null MSE curves for the Gaussian, gamma-copula and Student-t families.
    CompareDists {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_delimiter = ',', default_value = "100,300,500")]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Closed-form rates and, with --delta, the variance-like deviation.
    Bounds {
        #[arg(long)]
        total: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 6.0)]
        c_d: f64,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Optimal ε for the mean concentration bound.
    EpsilonStar {
        #[arg(long)]
        total: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 7.0)]
        h: f64,
    },
    /// Recompute the reference optimal-ε rows.
    Table2,
    /// MSE rate over a grid of N and d.
    Heatmap {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "100,1000,10000,100000,1000000"
        )]
        n_grid: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
        d_grid: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
    },
    /// Estimates on the first k features for k = 1..=max-dim.
    FeatureSweep {
        #[command(flatten)]
        data: DatasetArgs,
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Structural MST inequalities on random instances.
    VerifyStructure {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dims: Vec<usize>,
        /// Total sizes, as values or inclusive ranges like `20-200`.
        #[arg(long, value_delimiter = ',', default_value = "20-200")]
        sizes: Vec<String>,
    },
}

pub fn expand_sizes(items: &[String]) -> Result<Vec<usize>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad size {s:?}"))
    };
    let mut out = Vec::new();
    for item in items {
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(format!("empty size range {item:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(item)?),
        }
    }
    Ok(out)
}

pub fn dataset_spec(a: &DatasetArgs, seed: u64) -> Result<DatasetSpec, String> {
    let [x, y] = a.classes.as_slice() else {
        return Err(format!(
            "--classes needs exactly two labels, got {}",
            a.classes.len()
        ));
    };
    let mut spec = DatasetSpec::new(
        &a.input,
        ColumnRef::parse(&a.label_col),
        (x.as_str(), y.as_str()),
    );
    spec.seed = seed;
    spec.has_header = !a.no_header;
    spec.max_rows_per_class = a.max_rows_per_class;
    if let Some(cols) = &a.features {
        spec.features =
            FeatureSelection::Columns(cols.iter().map(|c| ColumnRef::parse(c)).collect());
    }
    spec.normalize = match a.normalize {
        NormalizeArg::None => Normalize::None,
        NormalizeArg::UnitCube => Normalize::UnitCube,
        NormalizeArg::ZScore => Normalize::ZScore,
    };
    if let Some(c) = a.delimiter {
        spec.delimiter =
            Some(u8::try_from(c).map_err(|_| format!("delimiter {c:?} is not one byte"))?);
    }
    spec.duplicates = match a.duplicates.as_str() {
        "keep" => Duplicates::Keep,
        "dedup" => Duplicates::Dedup,
        other => match other.strip_prefix("jitter:").map(str::parse::<f64>) {
            Some(Ok(amp)) if amp > 0.0 => Duplicates::Jitter(amp),
            _ => return Err(format!("bad --duplicates {other:?}")),
        },
    };
    Ok(spec)
}
