//! Cube-partitioned and corner-augmented (dual) variants of the statistic.
//!
//! The merged sample is framed by its tight axis-aligned bounding cube: the
//! origin is the per-axis minimum and the side is the largest per-axis extent.
//! The cube is cut into `l^d` congruent cells, half-open `[a, b)` on every axis
//! except the last cell, which is closed. Only nonempty cells are reported, in
//! lexicographic order of their integer coordinates.
//!
//! Within a cell the dual MST adds the cell's `2^d` corners. Corners are joined
//! to each other at zero cost, so they are contracted into one super-node whose
//! distance to a point is the distance to its nearest corner.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{count_dichotomous, Class, LabeledPointSet};
use crate::emst::{build_emst_fast, prim_dense, PointCloud};
use crate::error::{Error, Result};

/// Options shared by the partitioned statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PartitionOptions {
    /// Min-max rescale every axis to `[0, 1]` before framing.
    pub rescale_to_unit_cube: bool,
}

/// Axis-aligned cube `origin + [0, side]^d` cut into `l^d` cells.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFrame {
    pub origin: Vec<f64>,
    pub side: f64,
    pub l: usize,
}

impl CubeFrame {
    /// Tight bounding cube of `cloud`.
    pub fn bounding(cloud: &PointCloud, l: usize) -> Result<Self> {
        check_l(l)?;
        let d = cloud.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in cloud.points() {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let side = (0..d).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        Ok(Self {
            origin: lo,
            side,
            l,
        })
    }

    /// Integer coordinates of the cell holding `point`.
    pub fn cell_of(&self, point: &[f64]) -> Vec<u32> {
        let last = self.l - 1;
        point
            .iter()
            .zip(&self.origin)
            .map(|(&x, &o)| {
                if self.side <= 0.0 {
                    return 0;
                }
                let t = (x - o) / self.side * self.l as f64;
                (t.floor().max(0.0) as usize).min(last) as u32
            })
            .collect()
    }

    /// Lower and upper corners of a cell.
    pub fn cell_bounds(&self, cell: &[u32]) -> (Vec<f64>, Vec<f64>) {
        let l = self.l as f64;
        let at = |o: f64, k: u32| o + self.side * (f64::from(k) / l);
        cell.iter()
            .zip(&self.origin)
            .map(|(&k, &o)| (at(o, k), at(o, k + 1)))
            .unzip()
    }
}

/// One nonempty cell of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct CellStat {
    pub cell: Vec<u32>,
    pub m: usize,
    pub n: usize,
    /// FR statistic of the cell's own points; 0 when a class is missing.
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    pub l: usize,
    pub frame: CubeFrame,
    /// FR statistic of the whole (possibly rescaled) sample.
    pub global_r: usize,
    pub cells: Vec<CellStat>,
    /// Global MST edges whose endpoints lie in different cells.
    pub crossing_edge_count: usize,
}

impl PartitionReport {
    pub fn per_cell_r(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.r).collect()
    }

    pub fn sum_cell_r(&self) -> usize {
        self.cells.iter().map(|c| c.r).sum()
    }
}

/// Dual statistic of one nonempty cell.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCellStat {
    pub cell: Vec<u32>,
    pub m: usize,
    pub n: usize,
    /// Dichotomous point edges plus corner edges.
    pub dual_r: usize,
    pub dichotomous_edges: usize,
    pub corner_edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualFrResult {
    pub l: usize,
    pub frame: CubeFrame,
    pub cells: Vec<DualCellStat>,
    /// Corner edges summed over cells.
    pub corner_edge_count: usize,
}

impl DualFrResult {
    pub fn per_cell_dual_r(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.dual_r).collect()
    }

    pub fn total(&self) -> usize {
        self.cells.iter().map(|c| c.dual_r).sum()
    }
}

fn check_l(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidInput(
            "partition parameter l must be ≥ 1".into(),
        ));
    }
    Ok(())
}

fn rescaled(cloud: &PointCloud) -> Result<PointCloud> {
    let frame_lo: Vec<f64> = (0..cloud.dim())
        .map(|k| cloud.points().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let frame_hi: Vec<f64> = (0..cloud.dim())
        .map(|k| {
            cloud
                .points()
                .map(|p| p[k])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    cloud.map_points(|p, out| {
        for k in 0..p.len() {
            let w = frame_hi[k] - frame_lo[k];
            out[k] = if w > 0.0 {
                (p[k] - frame_lo[k]) / w
            } else {
                0.0
            };
        }
    })
}

/// Pooled cloud, labels, frame and the pooled indices of every nonempty cell.
struct Framed {
    cloud: PointCloud,
    labels: Vec<Class>,
    frame: CubeFrame,
    cells: Vec<(Vec<u32>, Vec<usize>)>,
}

fn frame_sample(sample: &LabeledPointSet, l: usize, opts: PartitionOptions) -> Result<Framed> {
    check_l(l)?;
    let mut cloud = sample.pooled();
    if opts.rescale_to_unit_cube {
        cloud = rescaled(&cloud)?;
    }
    let frame = if opts.rescale_to_unit_cube {
        CubeFrame {
            origin: vec![0.0; cloud.dim()],
            side: 1.0,
            l,
        }
    } else {
        CubeFrame::bounding(&cloud, l)?
    };
    let mut cells: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (i, p) in cloud.points().enumerate() {
        cells.entry(frame.cell_of(p)).or_default().push(i);
    }
    Ok(Framed {
        cloud,
        labels: sample.labels(),
        frame,
        cells: cells.into_iter().collect(),
    })
}

fn class_counts(labels: &[Class], members: &[usize]) -> (usize, usize) {
    let m = members.iter().filter(|&&i| labels[i] == Class::X).count();
    (m, members.len() - m)
}

/// Per-cell FR statistics plus the count of global MST edges crossing cells.
///
/// Always satisfies `global_r ≤ Σ r_i + |D|`, hence also the looser
/// `global_r ≤ Σ r_i + 2|D|`.
pub fn partition_fr(
    sample: &LabeledPointSet,
    l: usize,
    opts: PartitionOptions,
) -> Result<PartitionReport> {
    let framed = frame_sample(sample, l, opts)?;
    let Framed {
        cloud,
        labels,
        frame,
        cells,
    } = framed;

    let stats = cells
        .par_iter()
        .map(|(cell, members)| -> Result<CellStat> {
            let (m, n) = class_counts(&labels, members);
            let r = if m > 0 && n > 0 {
                let sub = cloud.select(members)?;
                let sub_labels: Vec<Class> = members.iter().map(|&i| labels[i]).collect();
                count_dichotomous(&build_emst_fast(&sub), &sub_labels)
            } else {
                0
            };
            Ok(CellStat {
                cell: cell.clone(),
                m,
                n,
                r,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cell_index = vec![0usize; cloud.len()];
    for (c, (_, members)) in cells.iter().enumerate() {
        for &i in members {
            cell_index[i] = c;
        }
    }
    let tree = build_emst_fast(&cloud);
    let crossing_edge_count = tree
        .edges()
        .iter()
        .filter(|e| cell_index[e.a] != cell_index[e.b])
        .count();

    Ok(PartitionReport {
        l,
        frame,
        global_r: count_dichotomous(&tree, &labels),
        cells: stats,
        crossing_edge_count,
    })
}

/// Distance from `p` to the nearest corner of the box `[lo, hi]`.
fn nearest_corner_distance(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    p.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&a, &b))| {
            let g = (x - a).abs().min((b - x).abs());
            g * g
        })
        .sum::<f64>()
        .sqrt()
}

/// Dual FR statistic of every nonempty cell.
///
/// Each cell's MST is built over its points plus one super-node standing for
/// the zero-cost corner clique. The cell's value counts dichotomous
/// point-point edges plus every edge to the super-node.
pub fn dual_fr_statistic(
    sample: &LabeledPointSet,
    l: usize,
    opts: PartitionOptions,
) -> Result<DualFrResult> {
    let Framed {
        cloud,
        labels,
        frame,
        cells,
    } = frame_sample(sample, l, opts)?;

    let stats: Vec<DualCellStat> = cells
        .par_iter()
        .map(|(cell, members)| {
            let (m, n) = class_counts(&labels, members);
            let (lo, hi) = frame.cell_bounds(cell);
            let k = members.len();
            let corner: Vec<f64> = members
                .iter()
                .map(|&i| nearest_corner_distance(cloud.point(i), &lo, &hi))
                .collect();
            let edges = prim_dense(k + 1, |i, j| match (i == k, j == k) {
                (false, false) => cloud.distance(members[i], members[j]),
                (true, false) => corner[j],
                (false, true) => corner[i],
                (true, true) => 0.0,
            });
            let corner_edges = edges.iter().filter(|e| e.b == k).count();
            let dichotomous_edges = edges
                .iter()
                .filter(|e| e.b != k && labels[members[e.a]] != labels[members[e.b]])
                .count();
            DualCellStat {
                cell: cell.clone(),
                m,
                n,
                dual_r: dichotomous_edges + corner_edges,
                dichotomous_edges,
                corner_edges,
            }
        })
        .collect();

    Ok(DualFrResult {
        l,
        frame,
        corner_edge_count: stats.iter().map(|c| c.corner_edges).sum(),
        cells: stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fr::fr_statistic;

    fn line() -> LabeledPointSet {
        LabeledPointSet::new(
            PointCloud::from_rows(&[[0.0, 0.0], [2.0, 0.0]]).unwrap(),
            PointCloud::from_rows(&[[1.0, 0.0], [3.0, 0.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn single_cell_is_the_plain_statistic() {
        let s = line();
        let rep = partition_fr(&s, 1, PartitionOptions::default()).unwrap();
        assert_eq!(rep.per_cell_r(), vec![3]);
        assert_eq!(rep.crossing_edge_count, 0);
        assert_eq!(rep.global_r, fr_statistic(&s).r_statistic);
    }

    #[test]
    fn two_cells_on_the_line() {
        let rep = partition_fr(&line(), 2, PartitionOptions::default()).unwrap();
        assert_eq!(rep.per_cell_r(), vec![1, 1]);
        assert_eq!(rep.crossing_edge_count, 1);
        assert!(rep.global_r <= rep.sum_cell_r() + 2 * rep.crossing_edge_count);
        let counts: usize = rep.cells.iter().map(|c| c.m + c.n).sum();
        assert_eq!(counts, 4);
    }

    #[test]
    fn last_cell_is_closed() {
        let c = PointCloud::from_rows(&[[0.0], [0.5], [1.0]]).unwrap();
        let f = CubeFrame::bounding(&c, 2).unwrap();
        assert_eq!(f.cell_of(&[0.0]), vec![0]);
        assert_eq!(f.cell_of(&[0.5]), vec![1]);
        assert_eq!(f.cell_of(&[1.0]), vec![1]);
        assert_eq!(f.cell_bounds(&[1]), (vec![0.5], vec![1.0]));
    }

    #[test]
    fn zero_l_rejected() {
        assert!(partition_fr(&line(), 0, PartitionOptions::default()).is_err());
        assert!(dual_fr_statistic(&line(), 0, PartitionOptions::default()).is_err());
    }

    #[test]
    fn dual_pair_in_unit_cell() {
        let s = LabeledPointSet::new(
            PointCloud::from_rows(&[[0.1, 0.5]]).unwrap(),
            PointCloud::from_rows(&[[0.9, 0.5]]).unwrap(),
        )
        .unwrap();
        let opts = PartitionOptions::default();
        let dual = dual_fr_statistic(&s, 1, opts).unwrap();
        let r = fr_statistic(&s).r_statistic;
        // The tight frame puts both points on corners of the cell.
        assert_eq!(dual.cells[0].corner_edges, 2);
        assert_eq!(dual.total(), 2);
        assert!(r <= dual.total() && dual.total() <= r + 6 * 4);
    }

    #[test]
    fn dual_far_from_corners_keeps_cross_edge() {
        let s = LabeledPointSet::new(
            PointCloud::from_rows(&[[0.0, 0.0], [0.48, 0.5], [1.0, 1.0]]).unwrap(),
            PointCloud::from_rows(&[[0.52, 0.5]]).unwrap(),
        )
        .unwrap();
        let dual = dual_fr_statistic(&s, 1, PartitionOptions::default()).unwrap();
        assert_eq!(dual.cells[0].dichotomous_edges, 1);
        assert!(dual.total() >= fr_statistic(&s).r_statistic);
    }

    #[test]
    fn rescale_uses_unit_frame() {
        let s = LabeledPointSet::new(
            PointCloud::from_rows(&[[0.0, 0.0], [10.0, 1.0]]).unwrap(),
            PointCloud::from_rows(&[[5.0, 0.2]]).unwrap(),
        )
        .unwrap();
        let opts = PartitionOptions {
            rescale_to_unit_cube: true,
        };
        let rep = partition_fr(&s, 2, opts).unwrap();
        assert_eq!(rep.frame.side, 1.0);
        let cells: Vec<Vec<u32>> = rep.cells.iter().map(|c| c.cell.clone()).collect();
        assert_eq!(cells, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
    }
}
