use flatdiv::bundled;
use flatdiv::cantor::{
    cheung_sum, dimension_lower_bound, extract_direction, half_identity_sum, synthetic_tree, CantorTree, PathPolicy,
};
use flatdiv::census::ConstantsProfile;
use flatdiv::pipeline::getting_started;
use flatdiv::twist::{grow_tree, GrowOptions};
use proptest::prelude::*;

/// Root of `sum_i r_i^s = 1` for ratios in (0, 1), by Newton's method.
fn similarity_dimension(ratios: &[f64]) -> f64 {
    let mut s = 0.5;
    for _ in 0..100 {
        let f: f64 = ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
        let df: f64 = ratios.iter().map(|r| r.powf(s) * r.ln()).sum();
        s -= f / df;
    }
    s
}

fn l_shape_tree() -> CantorTree {
    let l = bundled::l_shape();
    let k = ConstantsProfile::default_h2();
    let start = getting_started(&l, &k, 3.0).unwrap();
    grow_tree(&l, &start.beta0, GrowOptions::new(2, 3), &k).unwrap()
}

#[test]
fn half_identity_on_a_grown_tree() {
    let t = l_shape_tree();
    for n in t.internal_nodes() {
        let a = cheung_sum(&t, n.id, 0.5).unwrap();
        let b = half_identity_sum(&t, n.id).unwrap();
        assert!((a - b).abs() <= 1e-9 * a, "node {}: {a} vs {b}", n.id);
    }
}

#[test]
fn grown_tree_has_a_positive_bound_and_a_direction() {
    let t = l_shape_tree();
    let d = dimension_lower_bound(&t).unwrap();
    assert!(d.s_lower > 0.0 && d.s_lower < 0.5, "{}", d.s_lower);
    let dir = extract_direction(&t, &PathPolicy::Leftmost).unwrap();
    assert_eq!(dir.path.len(), 3);
    let root = t.node(t.root);
    assert!((dir.angle - root.interval.center).abs() <= root.interval.radius);
    let other = extract_direction(&t, &PathPolicy::Explicit(vec![2, 1])).unwrap();
    assert_ne!(other.path, dir.path);
}

#[test]
fn truncation_and_pruning_keep_structure() {
    let t = l_shape_tree();
    let t1 = t.truncated(1);
    assert_eq!(t1.max_depth(), 1);
    assert_eq!(t1.nodes.len(), 1 + t.node(t.root).children.len());
    t1.verify_nesting().unwrap();
    let p = t.pruned();
    assert!(p.nodes.len() <= t.nodes.len());
    assert!(dimension_lower_bound(&p).unwrap().s_lower >= dimension_lower_bound(&t).map_or(0.0, |d| d.s_lower));
}

#[test]
fn leaves_have_no_sum() {
    let t = synthetic_tree(2, 0.25, 1);
    assert!(cheung_sum(&t, 1, 0.5).is_err());
}

#[test]
fn tree_json_round_trips() {
    let t = synthetic_tree(3, 0.1, 2);
    let back: CantorTree = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn uniform_trees_match_similarity_dimension(k in 2usize..7, r in 0.02f64..0.45, depth in 1usize..4) {
        prop_assume!(k as f64 * r < 1.0);
        let t = synthetic_tree(k, r, depth);
        let s = dimension_lower_bound(&t).unwrap().s_lower;
        let want = similarity_dimension(&vec![r; k]);
        prop_assert!((s - want).abs() < 1e-6, "k {} r {} got {} want {}", k, r, s, want);
    }

    #[test]
    fn cheung_sum_is_monotone_in_s(k in 2usize..6, r in 0.05f64..0.45, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
        let t = synthetic_tree(k, r, 1);
        let (a, b) = (s1.min(s2), s1.max(s2));
        prop_assert!(cheung_sum(&t, 0, a).unwrap() >= cheung_sum(&t, 0, b).unwrap());
    }
}
