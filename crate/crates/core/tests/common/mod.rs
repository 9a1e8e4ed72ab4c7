#![allow(dead_code)]

use rand::Rng;
use revgeo::geodesic::{clairaut, flow};
use revgeo::{FamilySpec, NavigationParams, ProfileCurve, UnitTangentState};
use std::f64::consts::PI;

pub fn round() -> ProfileCurve {
    ProfileCurve::round(1.0).unwrap()
}
pub fn oblate() -> ProfileCurve {
    ProfileCurve::ellipsoid(1.0, 0.5).unwrap()
}
pub fn prolate() -> ProfileCurve {
    ProfileCurve::ellipsoid(1.0, 2.0).unwrap()
}
pub fn peanut() -> ProfileCurve {
    ProfileCurve::peanut(1.0, 1.0, 1.5).unwrap()
}
pub fn spiked() -> ProfileCurve {
    ProfileCurve::from_family(&FamilySpec::new("spiked", &[("disk_radius", 1.0), ("spike_len", 5.0), ("neck", 0.05)]))
        .unwrap()
}
pub fn zoll_bump() -> ProfileCurve {
    ProfileCurve::from_family(&FamilySpec::new("zoll_bump", &[])).unwrap()
}

pub fn zoo() -> Vec<(&'static str, ProfileCurve)> {
    vec![
        ("round", round()),
        ("oblate", oblate()),
        ("prolate", prolate()),
        ("spiked", spiked()),
        ("zoll_bump", zoll_bump()),
    ]
}

/// State at height `s` with Clairaut value `k` (|k| < r(s)), heading up or down.
pub fn state_with_k(profile: &ProfileCurve, theta: f64, s: f64, k: f64, up: bool) -> UnitTangentState {
    let b = (k / profile.r(s)).acos();
    UnitTangentState::new(theta, if up { b } else { -b }, s)
}

/// Random state away from the poles and from meridians: |K| ≥ 1e-3·r_max.
pub fn random_state<R: Rng>(profile: &ProfileCurve, rng: &mut R) -> UnitTangentState {
    let half = profile.half_length();
    loop {
        let s = rng.gen_range(0.02 * half..0.98 * half);
        let beta = rng.gen_range(-PI..PI);
        let st = UnitTangentState::new(rng.gen_range(0.0..2.0 * PI), beta, s);
        if clairaut(&st, profile).abs() >= 1e-3 * profile.r_max() {
            return st;
        }
    }
}

/// Whether the flow crosses s = s0 upward before `horizon`.
pub fn crosses_annulus(state: &UnitTangentState, profile: &ProfileCurve, horizon: f64) -> bool {
    let s0 = profile.s0();
    let mut ode = flow(state, profile, &NavigationParams::riemannian(), 1e-10).unwrap();
    while ode.t() < horizon {
        let before = ode.y()[2] - s0;
        ode.step(horizon).unwrap();
        let after = ode.y()[2] - s0;
        if before < 0.0 && after >= 0.0 {
            return true;
        }
    }
    false
}
