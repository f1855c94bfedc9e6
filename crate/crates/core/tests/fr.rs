use hpdiv::emst::PointCloud;
use hpdiv::estimator::{estimate_divergence, DivergenceEstimate};
use hpdiv::fr::checks::{dual_sandwich, dual_superadditivity, one_point_move, subadditivity};
use hpdiv::fr::{fr_statistic, DegreeConstant, LabeledPointSet, PartitionOptions};
use hpdiv::seeds::stream;
use proptest::prelude::*;
use rand::Rng;

fn uniform_sample(seed: u64, m: usize, n: usize, d: usize) -> LabeledPointSet {
    let mut rng = stream(seed, &[]);
    let mut cloud =
        |k: usize| PointCloud::new(d, (0..k * d).map(|_| rng.random::<f64>()).collect()).unwrap();
    let x = cloud(m);
    let y = cloud(n);
    LabeledPointSet::new(x, y).unwrap()
}

#[test]
fn swapping_labels_keeps_r() {
    for i in 0..50 {
        let s = uniform_sample(i, 30 + i as usize, 70, 3);
        assert_eq!(
            fr_statistic(&s).r_statistic,
            fr_statistic(&s.swapped()).r_statistic
        );
    }
}

#[test]
fn rigid_motions_keep_r() {
    for i in 0..50 {
        let s = uniform_sample(100 + i, 80, 80, 2);
        let (c, sn) = (0.6f64, 0.8f64);
        let moved = s
            .map_points(|p, out| {
                out[0] = c * p[0] - sn * p[1] + 3.0;
                out[1] = sn * p[0] + c * p[1] - 1.5;
            })
            .unwrap();
        assert_eq!(
            fr_statistic(&s).r_statistic,
            fr_statistic(&moved).r_statistic,
            "{i}"
        );
    }
}

#[test]
fn subadditivity_holds_for_several_partitions() {
    for i in 0..150u64 {
        let d = 2 + i as usize % 2;
        let s = uniform_sample(200 + i, 20 + i as usize, 40, d);
        for l in [2, 3, 4] {
            let c = subadditivity(&s, l, PartitionOptions::default()).unwrap();
            assert!(c.holds(), "instance {i}, l={l}: {c:?}");
        }
    }
}

#[test]
fn one_point_moves_change_r_by_at_most_24_in_the_plane() {
    let s = uniform_sample(3, 60, 60, 2);
    let mut rng = stream(4, &[]);
    for _ in 0..1000 {
        let idx = rng.random_range(0..s.total());
        let target = [rng.random::<f64>(), rng.random::<f64>()];
        let c = one_point_move(&s, idx, &target, DegreeConstant::Auto).unwrap();
        assert_eq!(c.rhs, 24);
        assert!(c.holds(), "{c:?}");
    }
}

#[test]
fn dual_inequalities_hold() {
    for i in 0..100u64 {
        let d = 2 + i as usize % 3;
        let s = uniform_sample(300 + i, 25, 35, d);
        for c in dual_sandwich(&s, DegreeConstant::Auto, PartitionOptions::default()).unwrap() {
            assert!(c.holds(), "instance {i}: {c:?}");
        }
        let c =
            dual_superadditivity(&s, 2, DegreeConstant::Auto, PartitionOptions::default()).unwrap();
        assert!(c.holds(), "instance {i}: {c:?}");
    }
}

#[test]
fn separated_classes_give_one_crossing_edge() {
    let s = uniform_sample(9, 50, 50, 2);
    let shifted = LabeledPointSet::new(
        s.x().clone(),
        s.y()
            .map_points(|p, o| {
                o[0] = p[0] + 10.0;
                o[1] = p[1];
            })
            .unwrap(),
    )
    .unwrap();
    let e = estimate_divergence(&shifted);
    assert_eq!(e.r_statistic, 1);
    assert!(e.d_hat > 0.95);
}

proptest! {
    #[test]
    fn estimate_identities(r in 0usize..400, m in 1usize..300, n in 1usize..300) {
        let e = DivergenceEstimate::from_counts(r, m, n).unwrap();
        prop_assert!((e.d_hat_raw + e.a_hat - 1.0).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&e.d_hat));
        prop_assert!((e.p_hat + e.q_hat - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn r_is_bounded_by_the_smaller_class(seed in any::<u64>(), m in 1usize..40, n in 1usize..40) {
        let s = uniform_sample(seed, m, n, 2);
        let r = fr_statistic(&s).r_statistic;
        prop_assert!(r >= 1);
        // Every dichotomous edge touches the smaller class, whose planar degrees are ≤ 6.
        prop_assert!(r <= 6 * m.min(n));
        prop_assert!(r < m + n);
    }
}
