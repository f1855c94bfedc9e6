//! Borůvka rounds driven by a k-d tree nearest-foreign-neighbour search.
//!
//! Each round finds, for every component, its minimum outgoing edge under the
//! crate edge order and merges along those edges. Subtrees whose points all
//! belong to the querying component are skipped; subtrees whose bounding box
//! is farther than the current candidate are pruned. Box distances are
//! computed with the same floating-point steps as point distances, so the
//! bound never exceeds a true distance and pruning is exact.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::{euclidean, Edge, PointCloud, SpanningTree, UnionFind};

const LEAF_SIZE: usize = 8;

/// Exact EMST with spatial indexing; identical to [`super::build_emst`].
///
/// Components are searched in parallel. Each component's search is sequential
/// and results are merged in component order, so the output does not depend
/// on the thread count.
pub fn build_emst_fast(cloud: &PointCloud) -> SpanningTree {
    let n = cloud.len();
    if n <= 1 {
        return SpanningTree::from_edges(Vec::new(), n);
    }
    let tree = KdTree::build(cloud);
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    let mut comp = vec![0usize; n];
    let mut node_comp = vec![None; tree.nodes.len()];

    while edges.len() + 1 < n {
        for (i, c) in comp.iter_mut().enumerate() {
            *c = uf.find(i);
        }
        tree.label_components(&comp, &mut node_comp);

        let mut members: Vec<(usize, usize)> = comp.iter().copied().zip(0..n).collect();
        members.sort_unstable();
        let groups: Vec<&[(usize, usize)]> = members.chunk_by(|a, b| a.0 == b.0).collect();

        let search = Search {
            cloud,
            tree: &tree,
            comp: &comp,
            node_comp: &node_comp,
        };
        let picks: Vec<Edge> = groups
            .par_iter()
            .map(|group| {
                let mut best = None;
                for &(c, p) in group.iter() {
                    search.nearest_foreign(p, c, &mut best);
                }
                best.expect("a foreign point exists while more than one component remains")
            })
            .collect();

        for e in picks {
            if uf.union(e.a, e.b) {
                edges.push(e);
            }
        }
    }
    SpanningTree::from_edges(edges, n)
}

struct Node {
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

struct KdTree {
    dim: usize,
    nodes: Vec<Node>,
    /// Bounding boxes, `dim` lows then `dim` highs per node.
    boxes: Vec<f64>,
    perm: Vec<usize>,
}

impl KdTree {
    fn build(cloud: &PointCloud) -> Self {
        let mut t = KdTree {
            dim: cloud.dim(),
            nodes: Vec::new(),
            boxes: Vec::new(),
            perm: (0..cloud.len()).collect(),
        };
        t.build_node(cloud, 0, cloud.len());
        t
    }

    fn build_node(&mut self, cloud: &PointCloud, start: usize, end: usize) -> usize {
        let dim = self.dim;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &self.perm[start..end] {
            for (k, &x) in cloud.point(i).iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            children: None,
        });
        self.boxes.extend_from_slice(&lo);
        self.boxes.extend_from_slice(&hi);

        if end - start > LEAF_SIZE {
            let axis = (0..dim)
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap();
            let mid = start + (end - start) / 2;
            self.perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                cloud.point(a)[axis]
                    .total_cmp(&cloud.point(b)[axis])
                    .then(a.cmp(&b))
            });
            let left = self.build_node(cloud, start, mid);
            let right = self.build_node(cloud, mid, end);
            self.nodes[id].children = Some((left, right));
        }
        id
    }

    fn bounds(&self, node: usize) -> (&[f64], &[f64]) {
        let base = node * 2 * self.dim;
        (
            &self.boxes[base..base + self.dim],
            &self.boxes[base + self.dim..base + 2 * self.dim],
        )
    }

    fn box_distance(&self, node: usize, p: &[f64]) -> f64 {
        let (lo, hi) = self.bounds(node);
        p.iter()
            .zip(lo.iter().zip(hi))
            .map(|(&x, (&l, &h))| {
                let gap = if x < l {
                    l - x
                } else if x > h {
                    x - h
                } else {
                    0.0
                };
                gap * gap
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `Some(c)` for nodes whose points all lie in component `c`.
    fn label_components(&self, comp: &[usize], out: &mut [Option<usize>]) {
        // Children always have larger ids than their parent.
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            out[id] = match node.children {
                Some((l, r)) => match (out[l], out[r]) {
                    (Some(a), Some(b)) if a == b => Some(a),
                    _ => None,
                },
                None => {
                    let first = comp[self.perm[node.start]];
                    self.perm[node.start..node.end]
                        .iter()
                        .all(|&i| comp[i] == first)
                        .then_some(first)
                }
            };
        }
    }
}

struct Search<'a> {
    cloud: &'a PointCloud,
    tree: &'a KdTree,
    comp: &'a [usize],
    node_comp: &'a [Option<usize>],
}

impl Search<'_> {
    fn nearest_foreign(&self, p: usize, c: usize, best: &mut Option<Edge>) {
        let q = self.cloud.point(p);
        let mut stack = vec![(0usize, self.tree.box_distance(0, q))];
        while let Some((node, bound)) = stack.pop() {
            if self.node_comp[node] == Some(c) {
                continue;
            }
            if let Some(b) = best {
                if bound > b.length {
                    continue;
                }
            }
            let n = &self.tree.nodes[node];
            match n.children {
                None => {
                    for &j in &self.tree.perm[n.start..n.end] {
                        if self.comp[j] == c {
                            continue;
                        }
                        let cand = Edge::new(p, j, euclidean(q, self.cloud.point(j)));
                        let better = match best {
                            None => true,
                            Some(b) => cand.cmp_key(b) == Ordering::Less,
                        };
                        if better {
                            *best = Some(cand);
                        }
                    }
                }
                Some((l, r)) => {
                    let dl = self.tree.box_distance(l, q);
                    let dr = self.tree.box_distance(r, q);
                    // Push the farther child first so the nearer one is searched first.
                    if dl <= dr {
                        stack.push((r, dr));
                        stack.push((l, dl));
                    } else {
                        stack.push((l, dl));
                        stack.push((r, dr));
                    }
                }
            }
        }
    }
}
