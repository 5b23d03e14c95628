use flatdiv::bundled;
use flatdiv::census::{cylinders_up_to, FULL_CIRCLE};
use flatdiv::interval::{angle_interval_for, check_nesting_and_separation, exclusion_from_vectors, ExclusionKind};
use flatdiv::twist::{protochild_surface, TwistFamily};
use flatdiv::{Mat2, PlanarVector};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

/// Horizontal part of `g` once `s_t` is turned to the vertical and flowed to
/// unit length, measured with explicit matrices.
fn measured_horizontal(g: PlanarVector, s_t: PlanarVector) -> f64 {
    let rot = Mat2::rotation(FRAC_PI_2 - s_t.arg());
    let flow = Mat2::geodesic(s_t.norm().ln());
    flow.mul(&rot).apply(g).x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_scan(
        beta_len in 1.5f64..50.0,
        beta_ang in 0.0f64..std::f64::consts::PI,
        area in 0.05f64..1.0,
        slide in -3.0f64..3.0,
        t0_target in 2.0f64..40.0,
        thin_scale in 0.05f64..2.0,
        r in 0.01f64..0.5,
    ) {
        let beta = PlanarVector::new(beta_ang.cos(), beta_ang.sin()).scale(beta_len);
        let normal = PlanarVector::new(-beta.y, beta.x).scale(1.0 / beta_len);
        // cross curve with |beta x s| = area
        let s = normal.scale(area / beta_len) + beta.scale(slide / beta_len);
        let thin = (s + beta.scale(t0_target)).scale(thin_scale / (s + beta.scale(t0_target)).norm());
        let e = exclusion_from_vectors(thin, beta, area, s, r, ExclusionKind::Custom).unwrap();
        prop_assert!((e.t0 - t0_target).abs() < 1e-9 * t0_target);
        let (lo, hi) = (e.t0 - 2.0 * e.radius_h - 1.0, e.t0 + 2.0 * e.radius_h + 1.0);
        for i in 0..100 {
            let t = lo + (hi - lo) * i as f64 / 99.0;
            if (t - e.lo()).abs() < 1e-6 || (t - e.hi()).abs() < 1e-6 {
                continue;
            }
            let h = measured_horizontal(thin, s + beta.scale(t));
            prop_assert_eq!(h.abs() < r, e.contains(t), "t {} h {} r {} interval {:?}", t, h, r, e);
        }
    }

    #[test]
    fn intervals_shrink_with_length(a in 3.0f64..1e6, k in 1.01f64..100.0) {
        let i = angle_interval_for(a, 0.3, 0.01).unwrap();
        let j = angle_interval_for(a * k, 0.3, 0.01).unwrap();
        prop_assert!(j.radius < i.radius);
        prop_assert!(j.weight() < i.weight());
        prop_assert!((i.radius * a * a * a.ln() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn exclusions_on_the_l_shape_match_protochild_surfaces() {
    let l = bundled::l_shape();
    let cyls = cylinders_up_to(&l, 40.0, 0.0, FULL_CIRCLE).unwrap();
    let parent = cyls.iter().find(|c| c.circumference > 2.0).unwrap();
    let f = TwistFamily::with_range(&l, parent, 2.0, 3).unwrap();
    let r = 0.3;
    let mut crossings = 0;
    for thin in cyls.iter().filter(|c| c.core_holonomy.cross(parent.core_holonomy).abs() > 1e-9) {
        let e = exclusion_from_vectors(
            thin.core_holonomy,
            f.parent.core_holonomy,
            f.parent.area,
            f.cross.holonomy,
            r,
            ExclusionKind::Custom,
        )
        .unwrap();
        if e.hi() < f.t_min || e.lo() > f.t_max {
            continue;
        }
        for i in 0..=120 {
            let t = f.t_min + (f.t_max - f.t_min) * i as f64 / 120.0;
            if (t - e.lo()).abs() < 1e-6 || (t - e.hi()).abs() < 1e-6 {
                continue;
            }
            let p = protochild_surface(&f, t).unwrap();
            let h = p.physical(thin.base_core().unwrap()).x;
            assert_eq!(h.abs() < r, e.contains(t), "t {t} h {h} {e:?}");
            crossings += usize::from(e.contains(t));
        }
    }
    assert!(crossings > 0);
}

#[test]
fn nesting_report_flags_overlaps() {
    let p = angle_interval_for(10.0, 1.0, 0.01).unwrap();
    let inside = angle_interval_for(1e3, 1.0 + 0.5 * p.radius, 0.01).unwrap();
    let far = angle_interval_for(1e3, 1.0 + 2.0 * p.radius, 0.01).unwrap();
    let ok = check_nesting_and_separation(&p, &[inside], p.rho);
    assert!(ok.pass);
    let bad = check_nesting_and_separation(&p, &[inside, far], p.rho);
    assert!(!bad.pass && !bad.nested[1]);
}
