//! Labelled CSV ingestion for two-class real data.
//!
//! Loading runs in a fixed order:
//!
//! 1. Parse the file and keep the rows whose label is one of the two classes.
//! 2. Apply the duplicate policy to the pooled rows.
//! 3. Subsample each class to `max_rows_per_class`.
//! 4. Normalise the pooled sample.
//!
//! Subsampling class `k` (0 for X, 1 for Y) draws from `stream(seed, [k])`.
//! Jitter draws from `stream(seed, [2])`. Kept rows stay in file order.

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::emst::PointCloud;
use crate::error::{Error, Result};
use crate::estimator::{estimate_divergence, DivergenceEstimate};
use crate::fr::LabeledPointSet;
use crate::report::{num, Table};
use crate::seeds::stream;

/// A column named in the header, or a zero-based position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    /// Digits are read as an index, anything else as a name.
    pub fn parse(s: &str) -> Self {
        s.parse()
            .map_or_else(|_| ColumnRef::Name(s.to_string()), ColumnRef::Index)
    }

    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<usize> {
        let found = match self {
            ColumnRef::Index(i) => Some(*i).filter(|&i| i < width),
            ColumnRef::Name(name) => header.and_then(|h| h.iter().position(|c| c == name)),
        };
        found.ok_or_else(|| Error::Schema {
            column: self.to_string(),
        })
    }
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSelection {
    /// Every column except the label, in file order.
    #[default]
    AllOthers,
    Columns(Vec<ColumnRef>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalize {
    #[default]
    None,
    /// Per-axis min-max to `[0, 1]` over the pooled sample.
    UnitCube,
    /// Per-axis centring and scaling to unit population variance.
    ZScore,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Duplicates {
    /// Keep repeated points and rely on the MST tie-breaking.
    #[default]
    Keep,
    /// Drop every repeat of an earlier feature vector, whatever its class.
    Dedup,
    /// Add uniform noise in `[-a, a]` to every coordinate of each repeat.
    Jitter(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub label_column: ColumnRef,
    pub features: FeatureSelection,
    /// Label values mapped to X and Y.
    pub classes: (String, String),
    pub max_rows_per_class: Option<usize>,
    pub seed: u64,
    pub normalize: Normalize,
    /// Field separator; detected among `,`, `;` and tab when `None`.
    pub delimiter: Option<u8>,
    pub has_header: bool,
    pub duplicates: Duplicates,
}

impl DatasetSpec {
    pub fn new(
        path: impl Into<PathBuf>,
        label_column: ColumnRef,
        classes: (impl Into<String>, impl Into<String>),
    ) -> Self {
        Self {
            path: path.into(),
            label_column,
            features: FeatureSelection::AllOthers,
            classes: (classes.0.into(), classes.1.into()),
            max_rows_per_class: None,
            seed: 0,
            normalize: Normalize::None,
            delimiter: None,
            has_header: true,
            duplicates: Duplicates::Keep,
        }
    }
}

/// Picks the candidate separator that occurs most often outside quotes on the
/// first non-empty line. Ties go to the comma.
pub fn detect_delimiter(text: &str) -> u8 {
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    let mut counts = [0usize; 3];
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            ',' if !quoted => counts[0] += 1,
            ';' if !quoted => counts[1] += 1,
            '\t' if !quoted => counts[2] += 1,
            _ => {}
        }
    }
    let best = (0..3)
        .rev()
        .max_by_key(|&i| counts[i])
        .expect("three candidates");
    if counts[best] == 0 {
        b','
    } else {
        b",;\t"[best]
    }
}

pub fn load_labeled_csv(spec: &DatasetSpec) -> Result<LabeledPointSet> {
    let text = std::fs::read_to_string(&spec.path)?;
    parse_labeled_csv(&text, spec)
}

/// [`load_labeled_csv`] on in-memory text; `spec.path` is ignored.
///
/// Parse errors report the 1-based file line and the 0-based column index.
pub fn parse_labeled_csv(text: &str, spec: &DatasetSpec) -> Result<LabeledPointSet> {
    if spec.classes.0 == spec.classes.1 {
        return Err(Error::Data(format!(
            "class pair needs two distinct labels, got {:?} twice",
            spec.classes.0
        )));
    }
    let delimiter = spec.delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header: Option<Vec<String>> = if spec.has_header {
        match records.next() {
            Some(r) => Some(r?.iter().map(str::to_string).collect()),
            None => return Err(Error::Data("file is empty".into())),
        }
    } else {
        None
    };
    let mut rows = Vec::new();
    for r in records {
        rows.push(r?);
    }
    let width = header
        .as_ref()
        .map(Vec::len)
        .or_else(|| rows.first().map(|r| r.len()))
        .ok_or_else(|| Error::Data("no data rows".into()))?;

    let label_col = spec.label_column.resolve(header.as_deref(), width)?;
    let feature_cols: Vec<usize> = match &spec.features {
        FeatureSelection::AllOthers => (0..width).filter(|&c| c != label_col).collect(),
        FeatureSelection::Columns(cols) => cols
            .iter()
            .map(|c| c.resolve(header.as_deref(), width))
            .collect::<Result<_>>()?,
    };
    if feature_cols.is_empty() {
        return Err(Error::Data("no feature columns selected".into()));
    }

    // (class, features) in file order.
    let mut kept: Vec<(usize, Vec<f64>)> = Vec::new();
    for rec in &rows {
        let class = match rec.get(label_col) {
            Some(l) if l == spec.classes.0 => 0,
            Some(l) if l == spec.classes.1 => 1,
            _ => continue,
        };
        let line = rec.position().map_or(0, |p| p.line());
        let features = feature_cols
            .iter()
            .map(|&c| {
                let cell = rec.get(c).unwrap_or("");
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row: line,
                        column: c,
                        value: cell.to_string(),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        kept.push((class, features));
    }
    for (k, name) in [&spec.classes.0, &spec.classes.1].into_iter().enumerate() {
        if !kept.iter().any(|r| r.0 == k) {
            return Err(Error::Data(format!(
                "fewer than 2 distinct labels among selected rows: no row labelled {name:?}"
            )));
        }
    }

    apply_duplicates(&mut kept, spec.duplicates, spec.seed)?;

    let d = feature_cols.len();
    let mut classes = [Vec::new(), Vec::new()];
    for (k, class) in classes.iter_mut().enumerate() {
        let members: Vec<&Vec<f64>> = kept.iter().filter(|r| r.0 == k).map(|r| &r.1).collect();
        let chosen: Vec<usize> = match spec.max_rows_per_class {
            Some(cap) if members.len() > cap => {
                let mut idx =
                    sample_indices(&mut stream(spec.seed, &[k as u64]), members.len(), cap)
                        .into_vec();
                idx.sort_unstable();
                idx
            }
            _ => (0..members.len()).collect(),
        };
        for i in chosen {
            class.extend_from_slice(members[i]);
        }
    }
    let [x, y] = classes;
    let sample = LabeledPointSet::new(PointCloud::new(d, x)?, PointCloud::new(d, y)?)?;
    normalize(&sample, spec.normalize)
}

fn apply_duplicates(
    rows: &mut Vec<(usize, Vec<f64>)>,
    policy: Duplicates,
    seed: u64,
) -> Result<()> {
    let key = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<u64>>();
    match policy {
        Duplicates::Keep => {}
        Duplicates::Dedup => {
            let mut seen = HashSet::new();
            rows.retain(|r| seen.insert(key(&r.1)));
            if !(rows.iter().any(|r| r.0 == 0) && rows.iter().any(|r| r.0 == 1)) {
                return Err(Error::Data("a class is empty after deduplication".into()));
            }
        }
        Duplicates::Jitter(a) => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!(
                    "jitter amplitude {a} must be positive"
                )));
            }
            let mut rng = stream(seed, &[2]);
            let mut seen = HashSet::new();
            for r in rows.iter_mut() {
                if !seen.insert(key(&r.1)) {
                    for v in r.1.iter_mut() {
                        *v += rng.random_range(-a..=a);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Applies `mode` with statistics taken over the pooled sample.
pub fn normalize(sample: &LabeledPointSet, mode: Normalize) -> Result<LabeledPointSet> {
    let pooled = sample.pooled();
    let d = pooled.dim();
    let k = pooled.len() as f64;
    let (shift, scale): (Vec<f64>, Vec<f64>) = match mode {
        Normalize::None => return Ok(sample.clone()),
        Normalize::UnitCube => (0..d)
            .map(|a| {
                let (lo, hi) = pooled
                    .points()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[a]), hi.max(p[a]))
                    });
                (lo, hi - lo)
            })
            .unzip(),
        Normalize::ZScore => (0..d)
            .map(|a| {
                let mean = pooled.points().map(|p| p[a]).sum::<f64>() / k;
                let var = pooled.points().map(|p| (p[a] - mean).powi(2)).sum::<f64>() / k;
                (mean, var.sqrt())
            })
            .unzip(),
    };
    sample.map_points(|p, out| {
        for a in 0..d {
            let s = if scale[a] > 0.0 { scale[a] } else { 1.0 };
            out[a] = (p[a] - shift[a]) / s;
        }
    })
}

/// Writes `label,f1,…,fd` rows with 17 significant digits, X rows first.
pub fn write_labeled_csv<W: Write>(
    sample: &LabeledPointSet,
    labels: (&str, &str),
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label".to_string()];
    header.extend((1..=sample.dim()).map(|k| format!("f{k}")));
    w.write_record(&header)?;
    for (cloud, label) in [(sample.x(), labels.0), (sample.y(), labels.1)] {
        for p in cloud.points() {
            let mut rec = vec![label.to_string()];
            rec.extend(p.iter().map(|v| format!("{v:.16e}")));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_labeled_csv_path(
    sample: &LabeledPointSet,
    labels: (&str, &str),
    path: &Path,
) -> Result<()> {
    write_labeled_csv(sample, labels, std::fs::File::create(path)?)
}

/// Estimate using only the first `k` features.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeatureSweepRow {
    pub k: usize,
    pub estimate: DivergenceEstimate,
}

/// Re-estimates the divergence on the first `k` features for `k = 1..=max_dim`.
pub fn feature_sweep(sample: &LabeledPointSet, max_dim: usize) -> Result<Vec<FeatureSweepRow>> {
    if max_dim == 0 || max_dim > sample.dim() {
        return Err(Error::InvalidInput(format!(
            "sweep depth {max_dim} not in 1..={}",
            sample.dim()
        )));
    }
    (1..=max_dim)
        .map(|k| {
            Ok(FeatureSweepRow {
                k,
                estimate: estimate_divergence(&sample.project(k)?),
            })
        })
        .collect()
}

pub fn feature_sweep_table(rows: &[FeatureSweepRow]) -> Table {
    let mut t = Table::new(["k", "m", "n", "R", "d_hat_raw", "d_hat", "a_hat"]);
    for r in rows {
        let e = &r.estimate;
        t.push(vec![
            r.k.to_string(),
            e.m.to_string(),
            e.n.to_string(),
            e.r_statistic.to_string(),
            num(e.d_hat_raw),
            num(e.d_hat),
            num(e.a_hat),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(label: &str) -> DatasetSpec {
        DatasetSpec::new("unused", ColumnRef::parse(label), ("a", "b"))
    }

    const TOY: &str = "f1,f2,label\n0,0,a\n1,0,b\n2,0,a\n3,0,b\n";

    #[test]
    fn toy_file_loads() {
        let s = parse_labeled_csv(TOY, &spec("label")).unwrap();
        assert_eq!((s.m(), s.n(), s.dim()), (2, 2, 2));
        assert_eq!(s.x().point(1), &[2.0, 0.0]);
        assert_eq!(estimate_divergence(&s).r_statistic, 3);
        let by_index = parse_labeled_csv(TOY, &spec("2")).unwrap();
        assert_eq!(by_index, s);
    }

    #[test]
    fn delimiters_are_detected() {
        assert_eq!(detect_delimiter("a;b;c\n"), b';');
        assert_eq!(detect_delimiter("a\tb\tc\n"), b'\t');
        assert_eq!(detect_delimiter("\"x;y\",b\n"), b',');
        let semi = TOY.replace(',', ";");
        assert_eq!(
            parse_labeled_csv(&semi, &spec("label")).unwrap(),
            parse_labeled_csv(TOY, &spec("label")).unwrap()
        );
    }

    #[test]
    fn schema_parse_and_data_errors() {
        match parse_labeled_csv(TOY, &spec("class")) {
            Err(Error::Schema { column }) => assert_eq!(column, "class"),
            other => panic!("{other:?}"),
        }
        let bad = TOY.replace("2,0,a", "2,x,a");
        match parse_labeled_csv(&bad, &spec("label")) {
            Err(Error::Parse { row, column, value }) => {
                assert_eq!((row, column, value.as_str()), (4, 1, "x"));
            }
            other => panic!("{other:?}"),
        }
        let one = TOY.replace(",b", ",a");
        assert!(matches!(
            parse_labeled_csv(&one, &spec("label")),
            Err(Error::Data(_))
        ));
        // Unselected rows may hold anything.
        let extra = format!("{TOY}oops,oops,c\n");
        assert!(parse_labeled_csv(&extra, &spec("label")).is_ok());
    }

    #[test]
    fn subsampling_is_seeded_and_exact() {
        let mut text = String::from("v,label\n");
        for i in 0..10_000 {
            text.push_str(&format!("{i},{}\n", if i % 2 == 0 { "a" } else { "b" }));
        }
        let mut sp = spec("label");
        sp.max_rows_per_class = Some(600);
        sp.seed = 4;
        let s = parse_labeled_csv(&text, &sp).unwrap();
        assert_eq!((s.m(), s.n()), (600, 600));
        assert_eq!(s, parse_labeled_csv(&text, &sp).unwrap());
        sp.seed = 5;
        assert_ne!(s, parse_labeled_csv(&text, &sp).unwrap());
    }

    #[test]
    fn duplicate_policies() {
        let text = "f,label\n1,a\n1,b\n2,a\n3,b\n";
        let mut sp = spec("label");
        assert_eq!(parse_labeled_csv(text, &sp).unwrap().total(), 4);
        sp.duplicates = Duplicates::Dedup;
        let s = parse_labeled_csv(text, &sp).unwrap();
        assert_eq!((s.m(), s.n()), (2, 1));
        sp.duplicates = Duplicates::Jitter(1e-6);
        let s = parse_labeled_csv(text, &sp).unwrap();
        let moved = s.y().point(0)[0];
        assert!(moved != 1.0 && (moved - 1.0).abs() <= 1e-6);
        assert_eq!(s.x().point(0), &[1.0]);
    }

    #[test]
    fn normalisation_modes() {
        let text = "f1,f2,label\n0,5,a\n2,5,b\n4,5,a\n";
        let mut sp = spec("label");
        sp.normalize = Normalize::UnitCube;
        let s = parse_labeled_csv(text, &sp).unwrap();
        assert_eq!(s.pooled().coords(), &[0.0, 0.0, 1.0, 0.0, 0.5, 0.0]);
        sp.normalize = Normalize::ZScore;
        let s = parse_labeled_csv(text, &sp).unwrap();
        let sum: f64 = s.pooled().points().map(|p| p[0]).sum();
        let sq: f64 = s.pooled().points().map(|p| p[0] * p[0]).sum();
        assert!(sum.abs() < 1e-12 && (sq / 3.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_ends_at_full_estimate() {
        let text = "f1,f2,f3,label\n0,1,0,a\n1,0,1,b\n2,1,3,a\n3,0,2,b\n5,5,5,a\n";
        let s = parse_labeled_csv(text, &spec("label")).unwrap();
        let rows = feature_sweep(&s, 3).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].estimate, estimate_divergence(&s));
        assert!(feature_sweep(&s, 4).is_err());
        assert_eq!(feature_sweep_table(&rows).rows.len(), 3);
    }
}
