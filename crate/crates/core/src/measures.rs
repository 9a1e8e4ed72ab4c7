//! Areas and contact volumes.
//!
//! The Zermelo contact form has volume form r/(1 + ar cos β)² dθ∧dβ∧ds; its total is 2π times
//! the Holmes–Thompson area, while the Busemann–Hausdorff area stays the Riemannian one.

use crate::error::{Error, Result};
use crate::geodesic::NavigationParams;
use crate::numeric::quad::{integrate, integrate_sqrt_ends, QuadTol};
use crate::profile::ProfileCurve;
use crate::return_map::{chunked, quad_tol, GeneratingTable, CHUNKS};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

fn along_meridian(profile: &ProfileCurve, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    let h = profile.half_length();
    chunked(g, 0.0, h, None, h / CHUNKS, quad_tol(profile))
}

/// 2π ∫ r ds.
pub fn riemannian_area(profile: &ProfileCurve) -> Result<f64> {
    Ok(TAU * along_meridian(profile, &|s| profile.r(s))?)
}

/// ∫₀^{2π} dβ / (1 + c cos β)² = 2π (1 − c²)^{−3/2}.
fn beta_closed(c: f64) -> f64 {
    TAU / (1.0 - c * c).powf(1.5)
}

/// Total contact volume with the β-integral done in closed form.
pub fn contact_volume_direct(profile: &ProfileCurve, nav: &NavigationParams) -> Result<f64> {
    nav.validate(profile)?;
    let a = nav.a;
    Ok(TAU
        * along_meridian(profile, &|s| {
            let r = profile.r(s);
            r * beta_closed(a * r)
        })?)
}

/// Same volume with the β-integral done by adaptive quadrature; kept as a cross-check.
pub fn contact_volume_2d(profile: &ProfileCurve, nav: &NavigationParams) -> Result<f64> {
    nav.validate(profile)?;
    let a = nav.a;
    let inner_tol = QuadTol { abs: 1e-13, rel: 1e-13, max_panels: 4000 };
    let failed = std::cell::Cell::new(None);
    let v = along_meridian(profile, &|s| {
        let r = profile.r(s);
        let c = a * r;
        match integrate(&|b: f64| 1.0 / (1.0 + c * b.cos()).powi(2), 0.0, TAU, inner_tol) {
            Ok(inner) => r * inner,
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    });
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(TAU * v?)
}

/// 4L∫₀¹F − 2L² + ∫_Γ (4πr − 2L cos β) dβ∧ds; a = 0 only.
pub fn contact_volume_via_f(profile: &ProfileCurve, table: &GeneratingTable) -> Result<f64> {
    let l = profile.minimal_equator().length;
    let m = profile.meridian_length();
    if (table.l - l).abs() > 1e-12 * l || (table.m - m).abs() > 1e-12 * m {
        return Err(Error::InvalidParam("generating table was built for a different profile".into()));
    }
    Ok(4.0 * l * table.integral_0_1() - 2.0 * l * l + 4.0 * PI * table.gamma.r_part - 2.0 * l * table.gamma.cos_part)
}

/// The lower bound 4L∫₀¹F − 2L² that drops the Γ term.
pub fn contact_volume_lower_bound(table: &GeneratingTable) -> f64 {
    4.0 * table.l * table.integral_0_1() - 2.0 * table.l * table.l
}

/// Busemann–Hausdorff area: the unit balls are translated Riemannian disks, so it is the Riemannian area.
pub fn bh_area(profile: &ProfileCurve, nav: &NavigationParams) -> Result<f64> {
    nav.validate(profile)?;
    riemannian_area(profile)
}

/// Holmes–Thompson area as vol(α_a)/2π; exactly the Riemannian area when there is no wind.
pub fn ht_area(profile: &ProfileCurve, nav: &NavigationParams) -> Result<f64> {
    if nav.a == 0.0 {
        return riemannian_area(profile);
    }
    Ok(contact_volume_direct(profile, nav)? / TAU)
}

/// Holmes–Thompson area from its definition, (1/π)∫ |polar of the unit ball| dA, with each
/// polar ellipse measured by slices. Independent of the contact-form route.
pub fn ht_area_polar(profile: &ProfileCurve, nav: &NavigationParams) -> Result<f64> {
    nav.validate(profile)?;
    let a = nav.a;
    let failed = std::cell::Cell::new(None);
    let v = along_meridian(profile, &|s| {
        let r = profile.r(s);
        match polar_ellipse_area_by_slices(a * r) {
            Ok(p) => r * p,
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    });
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    Ok(TAU / PI * v?)
}

/// Area of the polar of the unit disk translated by |a|: π(1 − a²)^{−3/2}.
pub fn translated_disk_polar_area(a: f64) -> Result<f64> {
    if !(a.abs() < 1.0) {
        return Err(Error::WindTooStrong(a.abs()));
    }
    Ok(PI / (1.0 - a * a).powf(1.5))
}

/// Area of {(1 − a²)p₁² + 2a p₁ + p₂² ≤ 1} by integrating the p₂-chord over p₁.
pub fn polar_ellipse_area_by_slices(a: f64) -> Result<f64> {
    if !(a.abs() < 1.0) {
        return Err(Error::WindTooStrong(a.abs()));
    }
    let (lo, hi) = (-1.0 / (1.0 - a), 1.0 / (1.0 + a));
    let chord = |p: f64| 2.0 * (1.0 - 2.0 * a * p - (1.0 - a * a) * p * p).max(0.0).sqrt();
    integrate_sqrt_ends(&chord, lo, hi, true, true, QuadTol { abs: 1e-14, rel: 1e-14, max_panels: 4000 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeReport {
    pub a: f64,
    pub riemannian_area: f64,
    pub contact_volume_direct: f64,
    /// Present only at a = 0.
    pub contact_volume_via_f: Option<f64>,
    pub bh_area: f64,
    pub ht_area: f64,
}

pub fn volume_report(
    profile: &ProfileCurve,
    nav: &NavigationParams,
    table: Option<&GeneratingTable>,
) -> Result<VolumeReport> {
    let contact = contact_volume_direct(profile, nav)?;
    let via_f = match table {
        Some(t) if nav.a == 0.0 => Some(contact_volume_via_f(profile, t)?),
        _ => None,
    };
    Ok(VolumeReport {
        a: nav.a,
        riemannian_area: riemannian_area(profile)?,
        contact_volume_direct: contact,
        contact_volume_via_f: via_f,
        bh_area: bh_area(profile, nav)?,
        ht_area: contact / TAU,
    })
}
