use hpdiv::emst::{brute_force_mst, build_emst, build_emst_fast, max_degree, PointCloud};
use hpdiv::seeds::stream;
use proptest::prelude::*;
use rand::Rng;

fn uniform(seed: u64, n: usize, d: usize) -> PointCloud {
    let mut rng = stream(seed, &[]);
    PointCloud::new(d, (0..n * d).map(|_| rng.random::<f64>()).collect()).unwrap()
}

#[test]
fn prim_matches_exhaustive_search() {
    for i in 0..1000u64 {
        let mut rng = stream(11, &[i]);
        let n = rng.random_range(1..=7);
        let d = rng.random_range(2..=3);
        let cloud = uniform(i, n, d);
        let prim = build_emst(&cloud);
        let brute = brute_force_mst(&cloud).unwrap();
        assert_eq!(prim.total_length(), brute.total_length(), "instance {i}");
        assert_eq!(prim.edge_pairs(), brute.edge_pairs(), "instance {i}");
    }
}

#[test]
fn fast_builder_is_identical_to_prim() {
    for i in 0..100u64 {
        let d = [2, 4, 8][i as usize % 3];
        let n = 2 + (i as usize * 197) % 1999;
        let cloud = uniform(1000 + i, n, d);
        let slow = build_emst(&cloud);
        let fast = build_emst_fast(&cloud);
        assert_eq!(slow, fast, "cloud {i}: n={n}, d={d}");
    }
}

#[test]
fn fast_builder_handles_ties_and_duplicates() {
    let grid: Vec<[f64; 2]> = (0..10)
        .flat_map(|a| (0..10).map(move |b| [a as f64, b as f64]))
        .chain([[0.0, 0.0], [3.0, 3.0]])
        .collect();
    let cloud = PointCloud::from_rows(&grid).unwrap();
    assert_eq!(build_emst(&cloud), build_emst_fast(&cloud));
    assert!(build_emst_fast(&cloud).is_spanning_tree());
}

#[test]
fn planar_degree_never_exceeds_six() {
    for i in 0..200u64 {
        let tree = build_emst_fast(&uniform(5000 + i, 500, 2));
        assert!(max_degree(&tree) <= 6);
    }
}

proptest! {
    #[test]
    fn every_build_is_a_spanning_tree(
        coords in proptest::collection::vec(-1e3f64..1e3, 2..120),
        d in 1usize..4,
    ) {
        let n = coords.len() / d;
        prop_assume!(n >= 1);
        let cloud = PointCloud::new(d, coords[..n * d].to_vec()).unwrap();
        let fast = build_emst_fast(&cloud);
        prop_assert!(fast.is_spanning_tree());
        prop_assert_eq!(fast.edges().len(), n - 1);
        prop_assert_eq!(fast, build_emst(&cloud));
    }

    #[test]
    fn tree_is_invariant_under_translation_by_integers(
        seed in any::<u64>(),
        shift in -8i32..8,
    ) {
        // Integer shifts of dyadic coordinates are exact, so no distance changes.
        let mut rng = stream(seed, &[]);
        let rows: Vec<[f64; 2]> = (0..40)
            .map(|_| [rng.random_range(0..1024) as f64 / 64.0, rng.random_range(0..1024) as f64 / 64.0])
            .collect();
        let a = PointCloud::from_rows(&rows).unwrap();
        let b = a.map_points(|p, out| {
            out[0] = p[0] + f64::from(shift);
            out[1] = p[1] + f64::from(shift);
        }).unwrap();
        prop_assert_eq!(build_emst_fast(&a).edge_pairs(), build_emst_fast(&b).edge_pairs());
    }
}
