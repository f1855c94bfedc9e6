//! Euclidean minimum spanning trees.
//!
//! Three constructions share one edge order so that their outputs are
//! directly comparable:
//!
//! | Function | Method | Use |
//! |----------|--------|-----|
//! | [`build_emst`] | dense Prim, O(n²) | reference path |
//! | [`build_emst_fast`] | Borůvka rounds with a k-d tree | large clouds |
//! | [`brute_force_mst`] | Prüfer enumeration of all n^(n-2) trees | test oracle, n ≤ 8 |
//!
//! Edges are ordered by the key `(length, min index, max index)`. Under this
//! strict total order the minimum spanning tree is unique, so repeated
//! distances never make the result depend on the algorithm.

mod boruvka;
mod brute;
mod prim;

use std::cmp::Ordering;

use crate::error::{Error, Result};

pub use boruvka::build_emst_fast;
pub use brute::{brute_force_mst, BRUTE_FORCE_LIMIT};
pub use prim::build_emst;
pub(crate) use prim::prim_dense;

/// An ordered set of `d`-dimensional points stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from flat row-major coordinates.
    ///
    /// Rejects `dim == 0`, an empty cloud, a coordinate count that is not a
    /// multiple of `dim`, and non-finite coordinates.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("point cloud must be nonempty".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                point: pos / dim,
                axis: pos % dim,
            });
        }
        Ok(Self { dim, coords })
    }

    /// Builds a cloud from a slice of rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidInput("point cloud must be nonempty".into()))?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a cloud holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    /// The sub-cloud made of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidInput(format!(
                    "index {i} out of range for {} points",
                    self.len()
                )));
            }
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords)
    }

    /// Keeps only the first `k` coordinates of every point.
    pub fn project(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim {
            return Err(Error::InvalidInput(format!(
                "cannot project dimension {} onto {k} axes",
                self.dim
            )));
        }
        let coords = self.points().flat_map(|p| p[..k].iter().copied()).collect();
        Self::new(k, coords)
    }

    /// Appends `other` after `self`.
    pub fn concat(&self, other: &PointCloud) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(Self {
            dim: self.dim,
            coords,
        })
    }

    /// Applies `f` to every point; the result must stay finite.
    pub fn map_points(&self, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        let mut coords = vec![0.0; self.coords.len()];
        for (src, dst) in self.points().zip(coords.chunks_exact_mut(self.dim)) {
            f(src, dst);
        }
        Self::new(self.dim, coords)
    }
}

/// Sum of squared coordinate differences in axis order, then the square root.
///
/// Every tree builder goes through this function, so equal pairs always get
/// bit-identical lengths.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// An undirected tree edge with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, length: f64) -> Self {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Self { a, b, length }
    }

    /// Position in the strict total order `(length, min index, max index)`.
    pub fn cmp_key(&self, other: &Edge) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

/// A spanning tree over `node_count` nodes, edges sorted by the edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree {
    edges: Vec<Edge>,
    node_count: usize,
}

impl SpanningTree {
    pub(crate) fn from_edges(mut edges: Vec<Edge>, node_count: usize) -> Self {
        edges.sort_by(Edge::cmp_key);
        debug_assert_eq!(edges.len() + 1, node_count.max(1));
        Self { edges, node_count }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Total length, summed in edge order so equal edge sets give equal sums.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// The `(a, b)` pairs, in edge order.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.a, e.b)).collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    /// Adjacency lists, neighbours in edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }

    /// Replays the edge list through a union-find: true iff there are exactly
    /// `node_count - 1` edges, none closes a cycle, and all endpoints are in range.
    pub fn is_spanning_tree(&self) -> bool {
        if self.node_count == 0 || self.edges.len() + 1 != self.node_count {
            return false;
        }
        let mut uf = UnionFind::new(self.node_count);
        self.edges
            .iter()
            .all(|e| e.b < self.node_count && uf.union(e.a, e.b))
    }
}

/// Maximum vertex degree of the tree (0 for a single node).
pub fn max_degree(tree: &SpanningTree) -> usize {
    tree.degrees().into_iter().max().unwrap_or(0)
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
