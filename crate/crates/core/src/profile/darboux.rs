//! Zoll spheres from a prescribed upper cap via the Darboux rule
//! √(1+z₋′²) + √(1+z₊′²) = 2R/√(R²−ρ²).
//!
//! The upper cap is z₊ = √(R²−ρ²) + δ(ρ) with δ even and vanishing near ±R.
//! Both branches are parametrized by t ∈ [0, π] with ρ = R sin t; on the lower
//! branch the rule becomes ds/dt = R·g(t), g = 2 − √(cos²t + (δ′cos t − sin t)²).

use super::families::DEFAULT_KNOTS;
use super::tabulate::{tabulate_param, ParamCurve};
use super::ProfileCurve;
use crate::error::{Error, Result};
use crate::numeric::quad::kronrod15;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

/// Deviation δ(ρ) of the upper cap from the round hemisphere.
pub trait ZPlus: Sync {
    /// (δ, δ′, δ″) at ρ ≥ 0.
    fn delta(&self, rho: f64) -> (f64, f64, f64);

    /// Radius beyond which δ vanishes identically.
    fn support(&self) -> f64;

    fn describe(&self) -> BTreeMap<String, f64>;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum CapShape {
    Round,
    /// amplitude·φ((ρ ∓ center)/width), φ(x) = exp(1 − 1/(1 − x²)); a pair at ±center when center > 0.
    Bump {
        amplitude: f64,
        width: f64,
        center: f64,
    },
}

fn bump(x: f64) -> (f64, f64, f64) {
    if x.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - x * x;
    let p = (1.0 - 1.0 / q).exp();
    (p, -2.0 * x * p / (q * q), p * (6.0 * x.powi(4) - 2.0) / q.powi(4))
}

impl ZPlus for CapShape {
    fn delta(&self, rho: f64) -> (f64, f64, f64) {
        match *self {
            CapShape::Round => (0.0, 0.0, 0.0),
            CapShape::Bump { amplitude, width, center } => {
                let one = |c: f64| {
                    let (p, dp, ddp) = bump((rho - c) / width);
                    (amplitude * p, amplitude * dp / width, amplitude * ddp / (width * width))
                };
                if center == 0.0 {
                    one(0.0)
                } else {
                    let (a, b) = (one(center), one(-center));
                    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
                }
            }
        }
    }

    fn support(&self) -> f64 {
        match *self {
            CapShape::Round => 0.0,
            CapShape::Bump { width, center, .. } => center.abs() + width,
        }
    }

    fn describe(&self) -> BTreeMap<String, f64> {
        match *self {
            CapShape::Round => BTreeMap::new(),
            CapShape::Bump { amplitude, width, center } => BTreeMap::from([
                ("amplitude".to_string(), amplitude),
                ("width".to_string(), width),
                ("center".to_string(), center),
            ]),
        }
    }
}

struct DarbouxCurve<'a> {
    cap: &'a dyn ZPlus,
    big_r: f64,
    // Cumulative z on the lower branch at uniform t nodes over [0, π/2], zero at π/2.
    zt: Vec<f64>,
    dt: f64,
}

/// g − cos t without cancellation, plus h, for the lower branch at parameter t.
fn lower_terms(cap: &dyn ZPlus, big_r: f64, t: f64) -> (f64, f64, f64) {
    let (s, c) = t.sin_cos();
    let (_, d1, _) = cap.delta(big_r * s);
    let m = d1 * c - s;
    let h = (c * c + m * m).sqrt();
    let one_minus_h = d1 * c * (2.0 * s - d1 * c) / (1.0 + h);
    let gap = one_minus_h + 2.0 * (0.5 * t).sin().powi(2);
    (gap, h, m)
}

impl DarbouxCurve<'_> {
    fn lower_zt(&self, t: f64) -> f64 {
        let (gap, h, _) = lower_terms(self.cap, self.big_r, t);
        let g = 2.0 - h;
        self.big_r * (gap.max(0.0) * (g + t.cos())).sqrt()
    }
}

impl ParamCurve for DarbouxCurve<'_> {
    fn domain(&self) -> (f64, f64) {
        (0.0, PI)
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = vec![0.0, FRAC_PI_2, PI];
        let sup = self.cap.support() / self.big_r;
        if sup > 0.0 && sup < 1.0 {
            let ts = sup.asin();
            b.insert(1, ts);
            b.insert(3, PI - ts);
        }
        b
    }

    fn eval(&self, t: f64) -> [f64; 6] {
        let big_r = self.big_r;
        let (s, c) = t.sin_cos();
        let rho = big_r * s;
        let (r, r_t, r_tt) = (rho, big_r * c, -big_r * s);
        if t <= FRAC_PI_2 {
            let j = ((t / self.dt) as usize).min(self.zt.len() - 2);
            let z = self.zt[j] + kronrod15(&|u| self.lower_zt(u), j as f64 * self.dt, t);
            let (gap, h, m) = lower_terms(self.cap, big_r, t);
            let (_, d1, d2) = self.cap.delta(rho);
            let g = 2.0 - h;
            let (z_t, z_tt) = if t < 1e-8 {
                let k = 1.0 - big_r * d2;
                (0.0, big_r * (2.0 - k * k).max(0.0).sqrt())
            } else {
                let root = (gap * (g + c)).sqrt();
                // h_t from d/dt of cos²t + m², m = δ′(R sin t) cos t − sin t.
                let m_t = d2 * big_r * c * c - d1 * s - c;
                let h_t = (-c * s + m * m_t) / h;
                (big_r * root, big_r * (-g * h_t + c * s) / root)
            };
            [r, z, r_t, z_t, r_tt, z_tt]
        } else {
            let (d0, d1, d2) = self.cap.delta(rho);
            let z = -big_r * c + d0;
            let z_t = big_r * s + d1 * big_r * c;
            let z_tt = big_r * c + d2 * big_r * big_r * c * c - d1 * big_r * s;
            [r, z, r_t, z_t, r_tt, z_tt]
        }
    }
}

const PRECONDITION_GRID: usize = 4000;
const LOWER_PANELS: usize = 8192;

pub(super) fn build(cap: &dyn ZPlus, radius: f64) -> Result<ProfileCurve> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParam(format!("radius must be positive, got {radius}")));
    }
    if cap.support() >= radius {
        return Err(Error::InvalidParam("z_plus must coincide with the round cap near ±R".into()));
    }
    // Margin 2R/√(R²−ρ²) − √(1+z₊′²) − 1 = (g − cos t)/cos t must stay positive for ρ ≠ 0.
    for i in 1..PRECONDITION_GRID {
        let rho = radius * i as f64 / PRECONDITION_GRID as f64;
        let t = (rho / radius).asin();
        let (gap, _, _) = lower_terms(cap, radius, t);
        let margin = gap / t.cos();
        if !(margin > 0.0) {
            return Err(Error::DarbouxPrecondition { rho, margin });
        }
    }
    let dt = FRAC_PI_2 / LOWER_PANELS as f64;
    let mut curve = DarbouxCurve { cap, big_r: radius, zt: vec![0.0; LOWER_PANELS + 1], dt };
    let mut acc = vec![0.0; LOWER_PANELS + 1];
    for j in (0..LOWER_PANELS).rev() {
        acc[j] = acc[j + 1] - kronrod15(&|u| curve.lower_zt(u), j as f64 * dt, (j + 1) as f64 * dt);
    }
    curve.zt = acc;
    let (r, z) = tabulate_param(&curve, DEFAULT_KNOTS)?;
    let mut params = cap.describe();
    params.insert("radius".into(), radius);
    let family = if params.len() == 1 { "zoll_round" } else { "zoll_bump" };
    ProfileCurve::from_tables(r, z, family, params, vec![])
}

impl ProfileCurve {
    /// Zoll sphere whose upper cap is `cap`; the lower cap follows from the Darboux rule.
    pub fn darboux_zoll(cap: &CapShape, radius: f64) -> Result<Self> {
        build(cap, radius)
    }

    /// As [`ProfileCurve::darboux_zoll`] for any cap deviation implementing [`ZPlus`].
    pub fn darboux_zoll_with(cap: &dyn ZPlus, radius: f64) -> Result<Self> {
        build(cap, radius)
    }
}
