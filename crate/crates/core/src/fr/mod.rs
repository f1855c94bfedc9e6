//! The Friedman-Rafsky multivariate runs statistic.
//!
//! Given samples X (m points) and Y (n points), build the Euclidean MST of the
//! pooled m+n points and count its *dichotomous* edges, the ones joining an
//! X point to a Y point. Few dichotomous edges mean the samples occupy
//! different regions; under the null the count concentrates near 2mn/(m+n).
//!
//! The [`partition`] submodule provides the cube-partitioned statistic and the
//! dual (corner-augmented) statistic used to bound the estimator's bias, and
//! [`checks`] turns their deterministic inequalities into margin reports.

pub mod checks;
pub mod partition;

use crate::emst::{build_emst_fast, max_degree, PointCloud, SpanningTree};
use crate::error::{Error, Result};

pub use partition::{
    dual_fr_statistic, partition_fr, CellStat, CubeFrame, DualCellStat, DualFrResult,
    PartitionOptions, PartitionReport,
};

/// Sample membership of a pooled point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    X,
    Y,
}

/// Two point clouds of equal dimension; X is class 0, Y is class 1.
///
/// Both classes are nonempty by construction. Pooled indices list X first.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPointSet {
    x: PointCloud,
    y: PointCloud,
}

impl LabeledPointSet {
    pub fn new(x: PointCloud, y: PointCloud) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: y.dim(),
            });
        }
        Ok(Self { x, y })
    }

    /// Splits a pooled cloud by label, preserving order within each class.
    pub fn from_labeled(cloud: &PointCloud, labels: &[Class]) -> Result<Self> {
        if labels.len() != cloud.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} points",
                labels.len(),
                cloud.len()
            )));
        }
        let pick =
            |class| -> Vec<usize> { (0..labels.len()).filter(|&i| labels[i] == class).collect() };
        let (xi, yi) = (pick(Class::X), pick(Class::Y));
        if xi.is_empty() {
            return Err(Error::EmptyClass("X"));
        }
        if yi.is_empty() {
            return Err(Error::EmptyClass("Y"));
        }
        Self::new(cloud.select(&xi)?, cloud.select(&yi)?)
    }

    pub fn x(&self) -> &PointCloud {
        &self.x
    }

    pub fn y(&self) -> &PointCloud {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn total(&self) -> usize {
        self.m() + self.n()
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// X points followed by Y points.
    pub fn pooled(&self) -> PointCloud {
        self.x
            .concat(&self.y)
            .expect("dimensions agree by construction")
    }

    pub fn labels(&self) -> Vec<Class> {
        let mut labels = vec![Class::X; self.m()];
        labels.resize(self.total(), Class::Y);
        labels
    }

    /// The same data with the roles of X and Y exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// Applies one point map to both classes.
    pub fn map_points(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        Self::new(self.x.map_points(&mut f)?, self.y.map_points(&mut f)?)
    }

    /// Keeps only the first `k` features.
    pub fn project(&self, k: usize) -> Result<Self> {
        Self::new(self.x.project(k)?, self.y.project(k)?)
    }
}

/// The FR statistic together with the tree it was counted on.
#[derive(Clone, Debug, PartialEq)]
pub struct FrResult {
    /// Number of dichotomous MST edges.
    pub r_statistic: usize,
    pub m: usize,
    pub n: usize,
    /// MST over the pooled sample (X indices first).
    pub tree: SpanningTree,
}

/// Counts the dichotomous edges of the pooled-sample MST.
///
/// Always at least 1, since a tree spanning both classes must cross between
/// them, and at most m+n-1.
pub fn fr_statistic(sample: &LabeledPointSet) -> FrResult {
    let tree = build_emst_fast(&sample.pooled());
    let r_statistic = count_dichotomous(&tree, &sample.labels());
    FrResult {
        r_statistic,
        m: sample.m(),
        n: sample.n(),
        tree,
    }
}

pub(crate) fn count_dichotomous(tree: &SpanningTree, labels: &[Class]) -> usize {
    tree.edges()
        .iter()
        .filter(|e| labels[e.a] != labels[e.b])
        .count()
}

/// Largest possible vertex degree of a Euclidean MST, where it is a fixed
/// number: 2 on the line, 6 in the plane.
pub fn known_degree_bound(dim: usize) -> Option<usize> {
    match dim {
        1 => Some(2),
        2 => Some(6),
        _ => None,
    }
}

/// How to choose the degree constant `c_d` in the structural bounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DegreeConstant {
    /// The known bound for d ≤ 2, otherwise the largest degree observed in
    /// the trees involved.
    #[default]
    Auto,
    Fixed(usize),
}

impl DegreeConstant {
    pub fn resolve(&self, dim: usize, trees: &[&SpanningTree]) -> usize {
        match *self {
            DegreeConstant::Fixed(c) => c,
            DegreeConstant::Auto => known_degree_bound(dim)
                .unwrap_or_else(|| trees.iter().map(|t| max_degree(t)).max().unwrap_or(0)),
        }
    }
}

/// |R(original) − R(perturbed)| when pooled point `index` moves to `new_position`.
///
/// The pooled index counts X points first. The change never exceeds 4·c_d.
pub fn perturb_one_point_delta(
    sample: &LabeledPointSet,
    index: usize,
    new_position: &[f64],
) -> Result<usize> {
    let (before, after) = perturbed_pair(sample, index, new_position)?;
    Ok(before.r_statistic.abs_diff(after.r_statistic))
}

pub(crate) fn perturbed_pair(
    sample: &LabeledPointSet,
    index: usize,
    new_position: &[f64],
) -> Result<(FrResult, FrResult)> {
    if index >= sample.total() {
        return Err(Error::InvalidInput(format!(
            "point index {index} out of range for {} points",
            sample.total()
        )));
    }
    if new_position.len() != sample.dim() {
        return Err(Error::DimensionMismatch {
            expected: sample.dim(),
            found: new_position.len(),
        });
    }
    let mut coords = sample.pooled().coords().to_vec();
    let d = sample.dim();
    coords[index * d..(index + 1) * d].copy_from_slice(new_position);
    let moved = PointCloud::new(d, coords)?;
    let moved = LabeledPointSet::from_labeled(&moved, &sample.labels())?;
    Ok((fr_statistic(sample), fr_statistic(&moved)))
}
