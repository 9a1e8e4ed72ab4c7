//! Named profile families.

use super::darboux::CapShape;
use super::tabulate::{tabulate_angle, tabulate_param, ParamCurve};
use super::ProfileCurve;
use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, QuadTol};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

pub const DEFAULT_KNOTS: usize = 8192;
const SPIKED_KNOTS: usize = 1 << 16;

/// `{"family": name, "params": {...}}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl FamilySpec {
    pub fn new(family: &str, params: &[(&str, f64)]) -> Self {
        FamilySpec { family: family.into(), params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect() }
    }

    fn get(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.params.get(key), default) {
            (Some(v), _) => Ok(*v),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidParam(format!("family `{}` needs parameter `{key}`", self.family))),
        }
    }

    fn check_known(&self, keys: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(Error::InvalidParam(format!(
                    "family `{}` has no parameter `{k}` (expected one of {keys:?})",
                    self.family
                )));
            }
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParam(format!("{name} must be positive, got {v}")))
    }
}

struct Ellipse {
    a: f64,
    c: f64,
}

impl ParamCurve for Ellipse {
    fn domain(&self) -> (f64, f64) {
        (0.0, PI)
    }

    fn eval(&self, t: f64) -> [f64; 6] {
        let (s, c) = t.sin_cos();
        [self.a * s, -self.c * c, self.a * c, self.c * s, -self.a * s, self.c * c]
    }
}

/// r = w sin t (1 + k cos²t), z = −c cos t: a waist of radius w between two bulges when k > 1/2.
struct Peanut {
    w: f64,
    k: f64,
    c: f64,
}

impl ParamCurve for Peanut {
    fn domain(&self) -> (f64, f64) {
        (0.0, PI)
    }

    fn eval(&self, t: f64) -> [f64; 6] {
        let (s, c) = t.sin_cos();
        let (w, k) = (self.w, self.k);
        [
            w * s * (1.0 + k * c * c),
            -self.c * c,
            w * (c + k * (c * c * c - 2.0 * s * s * c)),
            self.c * s,
            w * (-s + k * (2.0 * s * s * s - 7.0 * s * c * c)),
            self.c * c,
        ]
    }
}

/// C∞ step from 0 (x ≤ 0) to 1 (x ≥ 1) and its derivative.
pub(crate) fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let e0 = (-1.0 / x).exp();
    let e1 = (-1.0 / (1.0 - x)).exp();
    let den = e0 + e1;
    let d0 = e0 / (x * x);
    let d1 = e1 / ((1.0 - x) * (1.0 - x));
    (e0 / den, (d0 * e1 + e0 * d1) / (den * den))
}

struct Turn {
    start: f64,
    len: f64,
    dpsi: f64,
}

/// Tangent angle of a chain of straight runs joined by smooth turns.
struct AngleChain {
    turns: Vec<Turn>,
}

impl AngleChain {
    fn psi(&self, u: f64) -> (f64, f64) {
        self.turns.iter().fold((0.0, 0.0), |(p, dp), t| {
            let (hv, hd) = smooth_step((u - t.start) / t.len);
            (p + t.dpsi * hv, dp + t.dpsi * hd / t.len)
        })
    }
}

/// ∫₀^λ cos(ψ_s + Δ·H(u/λ)) du over the first `frac` of a turn.
fn turn_shift(len: f64, psi_s: f64, dpsi: f64, frac: f64) -> Result<f64> {
    let f = |x: f64| (psi_s + dpsi * smooth_step(x).0).cos();
    Ok(len * integrate(&f, 0.0, frac, QuadTol::abs(1e-15))?)
}

impl ProfileCurve {
    pub fn from_family(spec: &FamilySpec) -> Result<Self> {
        match spec.family.as_str() {
            "round" => {
                spec.check_known(&["radius"])?;
                ProfileCurve::round(spec.get("radius", Some(1.0))?)
            }
            "ellipsoid" => {
                spec.check_known(&["a", "c"])?;
                ProfileCurve::ellipsoid(spec.get("a", None)?, spec.get("c", None)?)
            }
            "peanut" => {
                spec.check_known(&["waist", "bulge", "half_height"])?;
                ProfileCurve::peanut(
                    spec.get("waist", Some(1.0))?,
                    spec.get("bulge", Some(1.0))?,
                    spec.get("half_height", Some(1.5))?,
                )
            }
            "spiked" => {
                spec.check_known(&["disk_radius", "spike_len", "neck", "thickness"])?;
                ProfileCurve::spiked(
                    spec.get("disk_radius", Some(1.0))?,
                    spec.get("spike_len", Some(5.0))?,
                    spec.get("neck", Some(0.05))?,
                    spec.get("thickness", Some(0.05))?,
                )
            }
            "zoll_bump" => {
                spec.check_known(&["radius", "amplitude", "width", "center"])?;
                let radius = spec.get("radius", Some(1.0))?;
                let cap = CapShape::Bump {
                    amplitude: spec.get("amplitude", Some(-0.15))?,
                    width: spec.get("width", Some(0.6))?,
                    center: spec.get("center", Some(0.0))?,
                };
                ProfileCurve::darboux_zoll(&cap, radius)
            }
            "zoll_round" => {
                spec.check_known(&["radius"])?;
                ProfileCurve::darboux_zoll(&CapShape::Round, spec.get("radius", Some(1.0))?)
            }
            other => Err(Error::UnknownFamily(other.into())),
        }
    }

    /// Ellipsoid of revolution with equatorial radius `a` and polar semi-axis `c`.
    pub fn ellipsoid(a: f64, c: f64) -> Result<Self> {
        let (a, c) = (positive("a", a)?, positive("c", c)?);
        let (r, z) = tabulate_param(&Ellipse { a, c }, DEFAULT_KNOTS)?;
        let params = BTreeMap::from([("a".to_string(), a), ("c".to_string(), c)]);
        ProfileCurve::from_tables(r, z, "ellipsoid", params, vec![])
    }

    pub fn peanut(waist: f64, bulge: f64, half_height: f64) -> Result<Self> {
        let w = positive("waist", waist)?;
        let k = positive("bulge", bulge)?;
        let c = positive("half_height", half_height)?;
        let (r, z) = tabulate_param(&Peanut { w, k, c }, DEFAULT_KNOTS)?;
        let params =
            BTreeMap::from([("waist".to_string(), w), ("bulge".to_string(), k), ("half_height".to_string(), c)]);
        ProfileCurve::from_tables(r, z, "peanut", params, vec![])
    }

    /// A thin disk of radius `disk_radius` carrying a tapered spike of length `spike_len`
    /// on its top face; `neck` is the radius of the spike at its base, the tip radius is neck/4.
    /// r is strictly monotone away from the rim, so the rim is the only equator.
    pub fn spiked(disk_radius: f64, spike_len: f64, neck: f64, thickness: f64) -> Result<Self> {
        let big_r = positive("disk_radius", disk_radius)?;
        let len = positive("spike_len", spike_len)?;
        let w = positive("neck", neck)?;
        let th = positive("thickness", thickness)?;
        if w >= 0.5 * big_r || th >= big_r {
            return Err(Error::InvalidParam(
                "neck must be below half the disk radius and thickness below the radius".into(),
            ));
        }
        let sin_d = 0.75 * w / len;
        if sin_d >= 0.5 {
            return Err(Error::InvalidParam("spike too short for its neck".into()));
        }
        let delta = sin_d.asin();
        let lam_rim = FRAC_PI_2 * th;
        let lam_fillet = w;
        let lam_tip = 0.2 * w;

        let a0 = big_r - turn_shift(lam_rim, 0.0, PI, 0.5)?;
        let d_fillet = turn_shift(lam_fillet, PI, -(FRAC_PI_2 - delta), 1.0)?;
        let a1 = a0 + d_fillet - w;
        let d_tip = turn_shift(lam_tip, FRAC_PI_2 + delta, FRAC_PI_2 - delta, 1.0)?;
        let tip_r = w - len * sin_d;
        let a3 = tip_r + d_tip;
        if a0 <= 0.0 || a1 <= 0.0 || a3 <= 0.0 {
            return Err(Error::InvalidParam("spiked parameters leave no room for the faces".into()));
        }
        let u1 = a0;
        let u2 = u1 + lam_rim + a1;
        let u3 = u2 + lam_fillet + len;
        let chain = AngleChain {
            turns: vec![
                Turn { start: u1, len: lam_rim, dpsi: PI },
                Turn { start: u2, len: lam_fillet, dpsi: -(FRAC_PI_2 - delta) },
                Turn { start: u3, len: lam_tip, dpsi: FRAC_PI_2 - delta },
            ],
        };
        // The cap after the tip turn runs horizontally to the axis, so its length is the remaining radius.
        let total = u3 + lam_tip + a3;
        let psi = |u: f64| chain.psi(u);
        let (r, z) = tabulate_angle(&psi, total, 0.0, SPIKED_KNOTS);
        let params = BTreeMap::from([
            ("disk_radius".to_string(), big_r),
            ("spike_len".to_string(), len),
            ("neck".to_string(), w),
            ("thickness".to_string(), th),
        ]);
        ProfileCurve::from_tables(r, z, "spiked", params, vec![])
    }
}
