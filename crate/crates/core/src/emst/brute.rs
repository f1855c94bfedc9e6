use std::cmp::Ordering;

use super::{Edge, PointCloud, SpanningTree};
use crate::error::{Error, Result};

/// Largest cloud accepted by [`brute_force_mst`] (8^6 = 262 144 trees).
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Minimum spanning tree by exhaustive enumeration of every labelled tree.
///
/// Trees are enumerated through their Prüfer sequences. The winner has the
/// smallest total length; exact ties fall back to comparing the sorted edge
/// keys lexicographically, which selects the same tree as the greedy builders.
pub fn brute_force_mst(cloud: &PointCloud) -> Result<SpanningTree> {
    let n = cloud.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            limit: BRUTE_FORCE_LIMIT,
            found: n,
        });
    }
    if n == 1 {
        return Ok(SpanningTree::from_edges(Vec::new(), 1));
    }
    if n == 2 {
        return Ok(SpanningTree::from_edges(
            vec![Edge::new(0, 1, cloud.distance(0, 1))],
            2,
        ));
    }

    let mut all: Vec<Edge> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            all.push(Edge::new(i, j, cloud.distance(i, j)));
        }
    }
    all.sort_by(Edge::cmp_key);
    let mut rank = vec![vec![0usize; n]; n];
    for (r, e) in all.iter().enumerate() {
        rank[e.a][e.b] = r;
        rank[e.b][e.a] = r;
    }

    let mut seq = vec![0usize; n - 2];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut ranks = Vec::with_capacity(n - 1);
    loop {
        ranks.clear();
        decode_prufer(&seq, n, |i, j| ranks.push(rank[i][j]));
        ranks.sort_unstable();
        let total: f64 = ranks.iter().map(|&r| all[r].length).sum();
        let better = match &best {
            None => true,
            Some((bt, br)) => match total.total_cmp(bt) {
                Ordering::Less => true,
                Ordering::Equal => ranks < *br,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((total, ranks.clone()));
        }
        if !advance(&mut seq, n) {
            break;
        }
    }

    let (_, ranks) = best.expect("at least one tree");
    let edges = ranks.into_iter().map(|r| all[r]).collect();
    Ok(SpanningTree::from_edges(edges, n))
}

/// Odometer increment over `0..n` digits; false once it wraps around.
fn advance(seq: &mut [usize], n: usize) -> bool {
    for digit in seq.iter_mut() {
        *digit += 1;
        if *digit < n {
            return true;
        }
        *digit = 0;
    }
    false
}

fn decode_prufer(seq: &[usize], n: usize, mut emit: impl FnMut(usize, usize)) {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        emit(leaf, s);
        degree[leaf] = 0;
        degree[s] -= 1;
    }
    let mut rest = (0..n).filter(|&v| degree[v] == 1);
    let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
    emit(u, v);
}
