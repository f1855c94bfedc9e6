use std::cmp::Ordering;

use super::{Edge, PointCloud, SpanningTree};

/// Exact EMST by dense Prim over the complete Euclidean graph.
///
/// Deterministic for a fixed input ordering; ties follow the crate edge order.
pub fn build_emst(cloud: &PointCloud) -> SpanningTree {
    let n = cloud.len();
    SpanningTree::from_edges(prim_dense(n, |i, j| cloud.distance(i, j)), n)
}

/// Prim on the complete graph over `0..n` with edge weights from `weight`.
///
/// The candidate edge of every outside vertex is tracked under the strict
/// `(weight, min, max)` order, so the result is the unique MST of that order.
pub(crate) fn prim_dense(n: usize, weight: impl Fn(usize, usize) -> f64) -> Vec<Edge> {
    if n <= 1 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<Edge> = (0..n).map(|v| Edge::new(0, v, weight(0, v))).collect();
    in_tree[0] = true;
    let mut edges = Vec::with_capacity(n - 1);

    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            pick = match pick {
                Some(u) if best[u].cmp_key(&best[v]) != Ordering::Greater => Some(u),
                _ => Some(v),
            };
        }
        let v = pick.expect("an outside vertex remains");
        in_tree[v] = true;
        edges.push(best[v]);
        for u in 0..n {
            if in_tree[u] {
                continue;
            }
            let cand = Edge::new(v, u, weight(v, u));
            if cand.cmp_key(&best[u]) == Ordering::Less {
                best[u] = cand;
            }
        }
    }
    edges
}
