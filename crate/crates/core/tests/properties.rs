mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revgeo::finsler::build_finsler_table;
use revgeo::geodesic::{finsler_norm, integrate};
use revgeo::measures::{bh_area, contact_volume_direct, ht_area, riemannian_area};
use revgeo::return_map::{build_generating_table, f_from_winding, first_return};
use revgeo::systole::{analyze, AnalysisOptions};
use revgeo::{GridSpec, NavigationParams, ProfileCurve, UnitTangentState};
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

fn profiles() -> &'static [(&'static str, ProfileCurve)] {
    static P: OnceLock<Vec<(&'static str, ProfileCurve)>> = OnceLock::new();
    P.get_or_init(|| {
        let mut z = zoo();
        z.push(("peanut", peanut()));
        z
    })
}

fn small_grid() -> GridSpec {
    GridSpec { nodes: 41, ..GridSpec::default() }
}

fn family_profile(kind: u8, x: f64) -> ProfileCurve {
    match kind % 3 {
        0 => ProfileCurve::ellipsoid(1.0, 0.4 + 2.0 * x).unwrap(),
        1 => ProfileCurve::peanut(1.0, 0.5 + x, 1.2 + x).unwrap(),
        _ => ProfileCurve::round(0.5 + 2.0 * x).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn clairaut_is_conserved(which in 0usize..6, seed in any::<u64>(), wind in -0.3f64..0.3) {
        let (_, p) = &profiles()[which];
        let st = random_state(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let nav = NavigationParams::new(wind / p.r_max());
        let tr = integrate(&st, p, &nav, 50.0, 1e-10).unwrap();
        prop_assert!(tr.max_clairaut_drift() < 1e-7, "drift {}", tr.max_clairaut_drift());
    }

    #[test]
    fn riemannian_flow_is_reversible(which in 0usize..6, seed in any::<u64>(), t in 1.0f64..20.0) {
        let (_, p) = &profiles()[which];
        let st = random_state(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let nav = NavigationParams::riemannian();
        // Orbits winding round the thin spike sweep hundreds of radians; 1e-13 keeps the round trip below 1e-7.
        let fwd = integrate(&st, p, &nav, t, 1e-13).unwrap().end();
        let back = integrate(&UnitTangentState::new(fwd.theta, fwd.beta + PI, fwd.s), p, &nav, t, 1e-13)
            .unwrap()
            .end();
        prop_assert!((back.s - st.s).abs() < 1e-7);
        prop_assert!((back.theta - st.theta).abs() < 1e-7);
        let db = (back.beta - PI - st.beta).rem_euclid(TAU);
        prop_assert!(db.min(TAU - db) < 1e-7);
    }

    #[test]
    fn finsler_norm_is_homogeneous(which in 0usize..6, u in 0.01f64..0.99, a in -0.9f64..0.9,
                                   x in -5.0f64..5.0, y in -5.0f64..5.0, lambda in 1e-3f64..1e3) {
        let (_, p) = &profiles()[which];
        let s = u * p.half_length();
        let nav = NavigationParams::new(a / p.r_max());
        let n1 = finsler_norm(p, &nav, s, x, y).unwrap();
        let n2 = finsler_norm(p, &nav, s, lambda * x, lambda * y).unwrap();
        prop_assert!((n2 - lambda * n1).abs() <= 1e-13 * n2.abs().max(1e-300));
    }

    #[test]
    fn reeb_velocity_has_unit_norm(which in 0usize..6, u in 0.01f64..0.99, a in -0.9f64..0.9, beta in -PI..PI) {
        let (_, p) = &profiles()[which];
        let s = u * p.half_length();
        let nav = NavigationParams::new(a / p.r_max());
        let n = finsler_norm(p, &nav, s, nav.a + beta.cos() / p.r(s), beta.sin()).unwrap();
        prop_assert!((n - 1.0).abs() < 1e-12, "norm {n}");
    }

    #[test]
    fn winding_matches_theta_advance(which in 0usize..6, eta in -0.99f64..0.99) {
        prop_assume!(eta.abs() > 1e-6);
        let (_, p) = &profiles()[which];
        let fr = first_return(eta, p, 1e-10).unwrap();
        prop_assert!((fr.winding - fr.theta_advance / TAU).abs() < 1e-9);
        prop_assert!((fr.eta - eta).abs() == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn inside_the_equator_band_returns(u in 0.02f64..0.98, k in 0.001f64..0.999, up: bool, which in 0usize..6) {
        let (_, p) = &profiles()[which];
        let s = u * p.half_length();
        let kk = k * p.r_min();
        prop_assume!(kk < p.r(s));
        let st = state_with_k(p, 0.0, s, kk, up);
        prop_assert!(crosses_annulus(&st, p, 50.0 * p.meridian_length()));
    }

    #[test]
    fn outside_the_equator_band_never_returns(u in 0.02f64..0.98, k in 0.001f64..0.999, up: bool) {
        let p = &profiles()[5].1;
        let s = u * p.half_length();
        let rmin = p.r_min();
        prop_assume!(p.r(s) > 1.002 * rmin);
        let kk = rmin * 1.001 + k * (p.r(s) - rmin * 1.001);
        let st = state_with_k(p, 0.0, s, kk, up);
        prop_assert!(!crosses_annulus(&st, p, 20.0 * p.meridian_length()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn generating_table_identities(kind in 0u8..3, x in 0.0f64..1.0) {
        let p = family_profile(kind, x);
        let t = build_generating_table(&p, &small_grid()).unwrap();
        let n = t.rows.len();
        for i in 0..n {
            let (r, m) = (&t.rows[i], &t.rows[n - 1 - i]);
            prop_assert!((r.eta + m.eta).abs() < 1e-15);
            prop_assert!((r.big_f - m.big_f).abs() < 1e-6, "parity F at {}", r.eta);
            // Strict inside; at η = ±1 the bound is attained when the region Γ is empty.
            let margin = r.big_f - t.l * r.eta.abs();
            if r.eta.abs() < 1.0 {
                prop_assert!(margin > 0.0, "lower bound at {}", r.eta);
            } else {
                prop_assert!(margin >= -1e-9 * t.l, "endpoint bound {margin}");
            }
        }
        let inner = t.interior();
        for (r, m) in inner.iter().zip(inner.iter().rev()) {
            prop_assert!((r.f + m.f).abs() < 1e-6, "parity f at {}", r.eta);
            prop_assert!((r.tau - (r.big_f - r.eta * r.f)).abs() < 1e-6, "genfun at {}", r.eta);
        }
        // f is continuous through η = 0, where both winding branches meet.
        let l = t.l;
        for e in [1e-5, -1e-5] {
            let fr = first_return(e, &p, 1e-10).unwrap();
            prop_assert!(f_from_winding(e, fr.winding, l).abs() < 1e-3 * l);
        }
    }

    #[test]
    fn return_time_is_exact(kind in 0u8..3, x in 0.0f64..1.0) {
        // τ' = −η f', as panel-midpoint differences on the default grid.
        let p = family_profile(kind, x);
        let t = build_generating_table(&p, &GridSpec::default()).unwrap();
        for w in t.interior().windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let h = b.eta - a.eta;
            let df = (b.f - a.f) / h;
            let residual = (b.tau - a.tau) / h + 0.5 * (a.eta + b.eta) * df;
            prop_assert!(residual.abs() < 1e-4 * (1.0 + df.abs()), "exactness at {}: {residual}", a.eta);
        }
    }

    #[test]
    fn profile_is_unit_speed(kind in 0u8..3, x in 0.0f64..1.0) {
        let p = family_profile(kind, x);
        prop_assert!(p.arc_length_defect(1000) < 1e-8);
    }

    #[test]
    fn ht_area_grows_with_wind(which in 0usize..6) {
        let (_, p) = &profiles()[which];
        let mut last = riemannian_area(p).unwrap();
        let nav0 = NavigationParams::riemannian();
        prop_assert_eq!(ht_area(p, &nav0).unwrap(), bh_area(p, &nav0).unwrap());
        for i in 1..=8 {
            let a = 0.11 * i as f64 / p.r_max();
            let hp = ht_area(p, &NavigationParams::new(a)).unwrap();
            let hm = ht_area(p, &NavigationParams::new(-a)).unwrap();
            prop_assert!((hp - hm).abs() <= 1e-12 * hp);
            prop_assert!(hp > last, "ht_area not increasing at a = {a}");
            last = hp;
        }
    }

    #[test]
    fn ratios_are_scale_invariant(c in 0.5f64..3.0, kind in 0u8..2, x in 0.0f64..1.0, a in 0.0f64..0.5) {
        let p = family_profile(kind, x);
        let q = p.scaled(c).unwrap();
        let area = riemannian_area(&p).unwrap();
        prop_assert!((riemannian_area(&q).unwrap() / (c * c * area) - 1.0).abs() < 1e-10);
        let nav = NavigationParams::new(a / p.r_max());
        let nav_q = NavigationParams::new(nav.a / c);
        let v = contact_volume_direct(&p, &nav).unwrap();
        prop_assert!((contact_volume_direct(&q, &nav_q).unwrap() / (c * c * v) - 1.0).abs() < 1e-10);
        let b = bh_area(&p, &nav).unwrap();
        prop_assert!((bh_area(&q, &nav_q).unwrap() / (c * c * b) - 1.0).abs() < 1e-10);
        let opts = AnalysisOptions { grid: small_grid(), ..AnalysisOptions::default() };
        let r1 = analyze(&p, &nav, &opts).unwrap().report;
        let r2 = analyze(&q, &nav_q, &opts).unwrap().report;
        prop_assert!((r1.rho_bh / r2.rho_bh - 1.0).abs() < 1e-8, "{} vs {}", r1.rho_bh, r2.rho_bh);
        prop_assert!((r1.rho_ht / r2.rho_ht - 1.0).abs() < 1e-8, "{} vs {}", r1.rho_ht, r2.rho_ht);
    }

    #[test]
    fn two_routes_to_t_agree(kind in 0u8..3, x in 0.0f64..1.0, a in -0.9f64..0.9) {
        let p = family_profile(kind, x);
        let t = build_generating_table(&p, &small_grid()).unwrap();
        let ft = build_finsler_table(&t, a / p.r_max()).unwrap();
        prop_assert!(ft.max_t_route_gap() < 1e-6, "gap {}", ft.max_t_route_gap());
    }
}
