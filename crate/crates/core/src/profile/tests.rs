use super::*;
use std::f64::consts::PI;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn unit_round_sphere() {
    let p = ProfileCurve::round(1.0).unwrap();
    assert!((p.meridian_length() - 2.0 * PI).abs() < 1e-15);
    let q = p.point(0.7);
    assert!((q.r - 0.7f64.sin()).abs() < 1e-15);
    assert!((q.z + 0.7f64.cos()).abs() < 1e-15);
    let eq = p.minimal_equator();
    assert_eq!(p.equators().len(), 1);
    assert!((eq.s0 - PI / 2.0).abs() < 1e-15);
    assert!((eq.length - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn round_radius_two() {
    let p = ProfileCurve::round(2.0).unwrap();
    assert!((p.meridian_length() - 4.0 * PI).abs() < 1e-14);
    assert!((p.r_min() - 2.0).abs() < 1e-15);
    assert!((p.s0() - PI).abs() < 1e-14);
}

#[test]
fn invalid_params_rejected() {
    assert!(matches!(ProfileCurve::round(-1.0), Err(Error::InvalidParam(_))));
    let bad = FamilySpec::new("torus", &[]);
    assert!(matches!(ProfileCurve::from_family(&bad), Err(Error::UnknownFamily(_))));
    let typo = FamilySpec::new("round", &[("radus", 1.0)]);
    assert!(matches!(ProfileCurve::from_family(&typo), Err(Error::InvalidParam(_))));
}

#[test]
fn prolate_ellipsoid() {
    let p = ProfileCurve::ellipsoid(1.0, 2.0).unwrap();
    let half = simpson(|t| (t.cos().powi(2) + 4.0 * t.sin().powi(2)).sqrt(), 0.0, PI, 20000);
    assert!((p.half_length() - half).abs() < 1e-10);
    assert_eq!(p.equators().len(), 1);
    assert!((p.r_min() - 1.0).abs() < 1e-12);
    assert!((p.minimal_equator().length - 2.0 * PI).abs() < 1e-11);
    assert!((p.s0() - half / 2.0).abs() < 1e-9);
    assert!(p.arc_length_defect(1000) < 1e-8);
}

#[test]
fn oblate_ellipsoid() {
    let p = ProfileCurve::ellipsoid(1.0, 0.5).unwrap();
    let half = simpson(|t| (t.cos().powi(2) + 0.25 * t.sin().powi(2)).sqrt(), 0.0, PI, 20000);
    assert!((p.half_length() - half).abs() < 1e-10);
    assert!(p.arc_length_defect(1000) < 1e-8);
    assert!(p.point(0.0).dr > 1.0 - 1e-12);
    assert!(p.point(p.half_length()).dr < -1.0 + 1e-12);
}

#[test]
fn peanut_has_waist_and_two_bulges() {
    let p = ProfileCurve::peanut(1.0, 1.0, 1.5).unwrap();
    let eqs = p.equators();
    assert_eq!(eqs.len(), 3);
    assert_eq!(eqs[0].kind, EquatorKind::Max);
    assert_eq!(eqs[1].kind, EquatorKind::Min);
    assert_eq!(eqs[2].kind, EquatorKind::Max);
    assert!((p.r_min() - 1.0).abs() < 1e-12);
    // Bulge maxima at sin²t = 2/3: r = √(2/3)·(4/3).
    let top = (2.0f64 / 3.0).sqrt() * 4.0 / 3.0;
    assert!((p.r_max() - top).abs() < 1e-10);
    assert!(p.arc_length_defect(1000) < 1e-8);
}

#[test]
fn spiked_profile_is_valid() {
    let spec = FamilySpec::new("spiked", &[("disk_radius", 1.0), ("spike_len", 5.0), ("neck", 0.05)]);
    let p = ProfileCurve::from_family(&spec).unwrap();
    assert!(p.meridian_length() > 10.0);
    assert_eq!(p.equators().len(), 1, "{:?}", p.equators());
    assert!((p.r_min() - 1.0).abs() < 1e-9);
    assert!((p.r_max() - 1.0).abs() < 1e-9);
    assert!(p.arc_length_defect(1000) < 1e-8);
    assert!(p.r(p.half_length()).abs() < 1e-10);
    for i in 1..1000 {
        assert!(p.r(p.half_length() * i as f64 / 1000.0) > 0.0);
    }
}

#[test]
fn sampled_unit_sphere() {
    let n = 400;
    let pts: Vec<(f64, f64, f64)> = (0..=n)
        .map(|i| {
            let s = PI * i as f64 / n as f64;
            (s, s.sin(), -s.cos())
        })
        .collect();
    let p = ProfileCurve::from_samples(&pts).unwrap();
    assert!((p.meridian_length() - 2.0 * PI).abs() < 1e-6);
    assert!(p.arc_length_defect(1000) < 1e-8);
}

#[test]
fn sampled_ellipsoid_reparametrized() {
    let n = 600;
    let pts: Vec<(f64, f64, f64)> = (0..=n)
        .map(|i| {
            let t = PI * i as f64 / n as f64;
            (t, t.sin(), -2.0 * t.cos())
        })
        .collect();
    let p = ProfileCurve::from_samples(&pts).unwrap();
    assert!(p.arc_length_defect(1000) < 1e-8);
    let half = simpson(|t| (t.cos().powi(2) + 4.0 * t.sin().powi(2)).sqrt(), 0.0, PI, 20000);
    assert!((p.half_length() - half).abs() < 1e-6);
}

#[test]
fn negative_radius_rejected() {
    let n = 100;
    let pts: Vec<(f64, f64, f64)> = (0..=n)
        .map(|i| {
            let s = PI * i as f64 / n as f64;
            let r = if i == 50 { -0.1 } else { s.sin() };
            (s, r, -s.cos())
        })
        .collect();
    let err = ProfileCurve::from_samples(&pts).unwrap_err();
    assert!(matches!(err, Error::NegativeRadius(_)));
    assert!(err.to_string().contains("negative radius"));
}

#[test]
fn self_intersecting_samples_rejected() {
    let n = 200;
    // z(t) = z(π − t) where sin³t = 1/4, so the curve crosses itself there.
    let pts: Vec<(f64, f64, f64)> = (0..=n)
        .map(|i| {
            let t = PI * i as f64 / n as f64;
            (t, t.sin(), -t.cos() + 2.0 * (2.0 * t).sin() * t.sin().powi(2))
        })
        .collect();
    assert!(matches!(ProfileCurve::from_samples(&pts), Err(Error::NotEmbedded(_))));
}

#[test]
fn darboux_round_cap_is_round_sphere() {
    let p = ProfileCurve::darboux_zoll(&CapShape::Round, 1.0).unwrap();
    assert!((p.meridian_length() - 2.0 * PI).abs() < 1e-9);
    let mut worst: f64 = 0.0;
    for i in 0..=1000 {
        let s = p.half_length() * i as f64 / 1000.0;
        worst = worst.max((p.r(s) - s.sin()).abs()).max((p.z(s) + s.cos()).abs());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn darboux_bump_is_valid() {
    let cap = CapShape::Bump { amplitude: -0.15, width: 0.6, center: 0.0 };
    let p = ProfileCurve::darboux_zoll(&cap, 1.0).unwrap();
    // Zoll spheres from this rule keep M = 2πR.
    assert!((p.meridian_length() - 2.0 * PI).abs() < 1e-8);
    assert!(p.arc_length_defect(1000) < 1e-8);
    assert_eq!(p.equators().len(), 1);
    assert!((p.r_min() - 1.0).abs() < 1e-10);
    assert!((p.ddr(p.s0()) + 1.0).abs() < 1e-6);
}

#[test]
fn darboux_precondition_violation_names_rho() {
    let cap = CapShape::Bump { amplitude: 0.3, width: 0.2, center: 0.5 };
    match ProfileCurve::darboux_zoll(&cap, 1.0) {
        Err(Error::DarbouxPrecondition { rho, .. }) => assert!(rho > 0.3 && rho < 0.7, "{rho}"),
        other => panic!("expected precondition error, got {other:?}"),
    }
}

#[test]
fn scaling_is_exact() {
    for p in [ProfileCurve::round(1.0).unwrap(), ProfileCurve::ellipsoid(1.0, 0.5).unwrap()] {
        let q = p.scaled(2.5).unwrap();
        assert_eq!(q.r_min(), 2.5 * p.r_min());
        assert_eq!(q.minimal_equator().length, 2.5 * p.minimal_equator().length);
        assert!((q.r(2.5 * 0.3) - 2.5 * p.r(0.3)).abs() < 1e-14);
        assert!((q.ddr(2.5 * 0.3) - p.ddr(0.3) / 2.5).abs() < 1e-12);
    }
}

#[test]
fn odd_extension_through_poles() {
    let p = ProfileCurve::ellipsoid(1.0, 0.5).unwrap();
    let h = p.half_length();
    assert!((p.r(-0.01) + p.r(0.01)).abs() < 1e-14);
    assert!((p.r(h + 0.01) + p.r(h - 0.01)).abs() < 1e-14);
}
