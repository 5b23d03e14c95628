use flatdiv::bundled;
use flatdiv::census::ConstantsProfile;
use flatdiv::flow::{
    components, exceptional_measure, flowed_length, lemma_l2_audit, occupancy_fraction, systole_trace, systole_trace_along,
};
use flatdiv::pipeline::{default_eps, getting_started};
use flatdiv::surface::enumerate::flat_systole;
use flatdiv::twist::{grow_tree, GrowOptions};
use flatdiv::{Mat2, PlanarVector};
use proptest::prelude::*;

#[test]
fn torus_vertical_flow_is_exponential() {
    let t = bundled::torus();
    let tr = systole_trace(&t, 0.0, 4.0, 0.25, 0.1).unwrap();
    for (&time, &s) in tr.times.iter().zip(&tr.systoles) {
        assert!((s - (-time).exp()).abs() < 1e-12, "t {time}: {s}");
    }
    // systole >= 0.1 until log 10
    let occ = occupancy_fraction(&tr, 0.1);
    let want = 10f64.ln() / 4.0;
    assert!((occ - want).abs() < 0.25 / 4.0, "{occ} {want}");
    let short = tr.short_cylinders.last().unwrap().as_ref().unwrap();
    assert!((short.length - (-4f64).exp()).abs() < 1e-12);
    assert!((short.area_fraction - 1.0).abs() < 1e-12);
}

#[test]
fn trace_starts_at_the_flat_systole() {
    for s in [bundled::torus(), bundled::l_shape(), bundled::octagon()] {
        let sys = flat_systole(&s).unwrap();
        for theta in [0.0, 0.7, 2.1] {
            let tr = systole_trace(&s, theta, 0.0, 0.1, 0.01).unwrap();
            assert!((tr.systoles[0] - sys).abs() < 1e-9 * sys);
        }
    }
}

#[test]
fn bad_grid_is_rejected() {
    let t = bundled::torus();
    assert!(systole_trace(&t, 0.0, 1.0, 0.0, 0.1).is_err());
    assert!(systole_trace(&t, 0.0, -1.0, 0.1, 0.1).is_err());
}

#[test]
fn audits_pass_on_a_grown_branch() {
    let l = bundled::l_shape();
    let k = ConstantsProfile::default_h2();
    let start = getting_started(&l, &k, 3.0).unwrap();
    let tree = grow_tree(&l, &start.beta0, GrowOptions::new(2, 1), &k).unwrap();
    let path = tree.leftmost_path();
    let w = tree.node(*path.last().unwrap()).cylinder.base_core;
    let eps = default_eps(&k);
    for p in path.windows(2) {
        let a = lemma_l2_audit(&l, &tree, p[0], p[1], w, eps, 0.05, false).unwrap();
        assert!(a.pass, "{a:?}");
        assert!(!a.hypothesis_met);
        assert!(lemma_l2_audit(&l, &tree, p[0], p[1], w, eps, 0.05, true).is_err());
    }
    // the branch contracts its last core, so that core ends up short
    let tr = systole_trace_along(&l, w, tree.node(*path.last().unwrap()).cylinder.length.ln(), 0.5, eps).unwrap();
    assert!(*tr.systoles.last().unwrap() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rotating_the_surface_shifts_theta(theta in 0.0f64..3.1, phi in -1.5f64..1.5) {
        let l = bundled::l_shape();
        let r = l.apply_gl2(&Mat2::rotation(phi)).unwrap();
        let a = systole_trace(&l, theta, 2.0, 0.5, 0.01).unwrap();
        let b = systole_trace(&r, theta - phi, 2.0, 0.5, 0.01).unwrap();
        for (x, y) in a.systoles.iter().zip(&b.systoles) {
            prop_assert!((x - y).abs() < 1e-6 * x, "{} {}", x, y);
        }
    }

    #[test]
    fn exceptional_time_matches_closed_form(lh in -12.0f64..-3.0, lv in 1.0f64..6.0, leps in -4.0f64..-1.0) {
        let (h0, v0, eps) = (lh.exp(), lv.exp(), leps.exp());
        // |length| > eps exactly off [log(v0/eps), log(eps/h0)] when that interval is far from both ends
        let (a, b) = ((v0 / eps).ln(), (eps / h0).ln());
        prop_assume!(b > a + 0.5);
        let hi = b + 2.0;
        let m = exceptional_measure(h0, v0, 0.0, hi, eps, 0.01);
        let want = a + (hi - b);
        // hypot <= sqrt2 max, so each crossing moves by at most log(sqrt2)
        prop_assert!(m >= want - 0.02 && m <= want + 0.02 + std::f64::consts::LN_2, "{} {}", m, want);
        prop_assert!(flowed_length(h0, v0, 0.5 * (a + b)) <= eps * 2f64.sqrt());
    }

    #[test]
    fn components_are_an_orthonormal_split(x in -5.0f64..5.0, y in -5.0f64..5.0, wx in 0.1f64..3.0, wy in -3.0f64..3.0) {
        let o = bundled::octagon();
        let beta = PlanarVector::new(x, y);
        let w = PlanarVector::new(wx, wy);
        let (h, v) = components(&o, beta, w);
        let len = o.physical(beta).norm();
        prop_assert!((h.hypot(v) - len).abs() < 1e-9 * (1.0 + len));
    }
}
