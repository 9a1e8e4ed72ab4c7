//! Generating function of the wind-shifted return map, its fixed points, and the search for a
//! short closed geodesic below the first critical point of F.
//!
//! With T(η) = ∫₀^η τ = 2∫₀^η F − ηF, the windy generating function is F_a = F + a·r_min·T and
//! F_a′ = f + a·r_min·τ. Return times do not depend on a.

use crate::error::{Error, Result};
use crate::numeric::roots::{brent, golden_min};
use crate::numeric::spline::CubicSpline;
use crate::profile::ProfileCurve;
use crate::return_map::{f_from_winding, first_return, GeneratingRow, GeneratingTable};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

/// Allowed disagreement between the two routes to T.
pub const T_ROUTE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinslerRow {
    pub eta: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
    /// 2∫₀^η F − ηF.
    #[serde(rename = "T")]
    pub t: f64,
    /// ∫₀^η τ by spline quadrature; NaN at η = ±1.
    #[serde(rename = "T_quadrature")]
    pub t_quad: f64,
    #[serde(rename = "Fa")]
    pub fa: f64,
    #[serde(rename = "Fa_prime")]
    pub fa_prime: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FinslerTable {
    pub a: f64,
    pub r_min: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub rows: Vec<FinslerRow>,
    #[serde(skip)]
    base: GeneratingTable,
}

/// ∫₀^η F at every row by the end-corrected trapezoid rule, walking out from η = 0.
fn cumulative_f(rows: &[GeneratingRow]) -> Vec<f64> {
    let zero = rows.iter().position(|r| r.eta == 0.0).expect("grid contains η = 0");
    let n = rows.len();
    let mut out = vec![0.0; n];
    let panel = |p: &GeneratingRow, q: &GeneratingRow| {
        let h = q.eta - p.eta;
        let corr = if p.f.is_finite() && q.f.is_finite() { h * h * (p.f - q.f) / 12.0 } else { 0.0 };
        0.5 * h * (p.big_f + q.big_f) + corr
    };
    for i in zero + 1..n {
        out[i] = out[i - 1] + panel(&rows[i - 1], &rows[i]);
    }
    for i in (0..zero).rev() {
        out[i] = out[i + 1] - panel(&rows[i], &rows[i + 1]);
    }
    out
}

/// The wind enters only through a·r_min, so negative a needs no special casing here; the
/// mirror η ↦ −η relating S_a and S_{−a} is used by [`prop1_search`].
pub fn build_finsler_table(base: &GeneratingTable, a: f64) -> Result<FinslerTable> {
    let r_min = base.r_min;
    if !a.is_finite() {
        return Err(Error::InvalidParam(format!("wind must be finite, got {a}")));
    }
    let c = a * r_min;
    let cum = cumulative_f(&base.rows);
    let interior = base.interior();
    let x: Vec<f64> = interior.iter().map(|r| r.eta).collect();
    let tau_spline = CubicSpline::new(&x, &interior.iter().map(|r| r.tau).collect::<Vec<_>>())?;
    let at_zero = tau_spline.integral_to(0.0);
    let last = base.rows.len() - 1;
    let mut rows = Vec::with_capacity(base.rows.len());
    for (i, r) in base.rows.iter().enumerate() {
        let t = 2.0 * cum[i] - r.eta * r.big_f;
        let interior_row = i != 0 && i != last;
        let t_quad = if interior_row { tau_spline.integral_to(r.eta) - at_zero } else { f64::NAN };
        if interior_row && !((t - t_quad).abs() <= T_ROUTE_TOL) {
            return Err(Error::CrossCheck {
                what: "T closed form vs quadrature of tau",
                eta: r.eta,
                discrepancy: (t - t_quad).abs(),
                tol: T_ROUTE_TOL,
            });
        }
        rows.push(FinslerRow {
            eta: r.eta,
            big_f: r.big_f,
            t,
            t_quad,
            fa: r.big_f + c * t,
            fa_prime: r.f + c * r.tau,
            tau: r.tau,
        });
    }
    Ok(FinslerTable { a, r_min, l: base.l, rows, base: base.clone() })
}

impl FinslerTable {
    pub fn base(&self) -> &GeneratingTable {
        &self.base
    }

    pub fn interior(&self) -> &[FinslerRow] {
        &self.rows[1..self.rows.len() - 1]
    }

    /// (F_a(−1), F_a(1)).
    pub fn endpoints(&self) -> (f64, f64) {
        (self.rows[0].fa, self.rows[self.rows.len() - 1].fa)
    }

    pub fn max_t_route_gap(&self) -> f64 {
        self.interior().iter().map(|r| (r.t - r.t_quad).abs()).fold(0.0, f64::max)
    }

    /// Export `eta,F,T,Fa,Fa_prime,tau`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["eta", "F", "T", "Fa", "Fa_prime", "tau"])?;
        for r in &self.rows {
            w.write_record([r.eta, r.big_f, r.t, r.fa, r.fa_prime, r.tau].map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// (F, f, τ) at η from a fresh return-map integration.
fn node_eval(profile: &ProfileCurve, eta: f64, tol: f64) -> Result<(f64, f64, f64)> {
    let ret = first_return(eta, profile, tol)?;
    let f = f_from_winding(eta, ret.winding, profile.minimal_equator().length);
    Ok((ret.tau + eta * f, f, ret.tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub eta: f64,
    /// F_a′(η) = k·L.
    pub k: i64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Continuum {
    pub k: i64,
    pub min_length: f64,
    pub max_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoints {
    pub points: Vec<FixedPoint>,
    /// Set when F_a′ is constant and a multiple of L: every η is fixed.
    pub continuum: Option<Continuum>,
}

/// Spread of F_a′ below which the table is treated as constant.
const FLAT_TOL: f64 = 1e-6;

/// Roots of F_a′ − kL over the interior nodes, refined by Brent on re-integrated return data.
/// At a = 0 the node η = 0 is always a root: the meridians, of length M.
pub fn fixed_points(profile: &ProfileCurve, ft: &FinslerTable) -> Result<FixedPoints> {
    let l = ft.l;
    let c = ft.a * ft.r_min;
    let rows = ft.interior();
    let tol = ft.base.spec.ode_tol;
    let (lo, hi) =
        rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.fa_prime), hi.max(r.fa_prime)));
    if hi - lo < FLAT_TOL * l {
        let k = (0.5 * (lo + hi) / l).round();
        let continuum = if (0.5 * (lo + hi) - k * l).abs() < FLAT_TOL * l {
            let (mn, mx) =
                rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.tau), b.max(r.tau)));
            Some(Continuum { k: k as i64, min_length: mn, max_length: mx })
        } else {
            None
        };
        return Ok(FixedPoints { points: vec![], continuum });
    }
    let mut exact = vec![];
    let mut brackets = vec![];
    for (i, r) in rows.iter().enumerate() {
        let k = (r.fa_prime / l).round();
        if r.fa_prime == k * l {
            exact.push(FixedPoint { eta: r.eta, k: k as i64, length: r.tau });
        }
        if let Some(q) = rows.get(i + 1) {
            let (a, b) = (r.fa_prime.min(q.fa_prime), r.fa_prime.max(q.fa_prime));
            let k_lo = (a / l).floor() as i64 + 1;
            let k_hi = (b / l).ceil() as i64 - 1;
            for k in k_lo..=k_hi {
                let target = k as f64 * l;
                if target > a && target < b {
                    brackets.push((r.eta, q.eta, k));
                }
            }
        }
    }
    let refined: Result<Vec<FixedPoint>> = brackets
        .par_iter()
        .map(|&(e0, e1, k)| {
            let target = k as f64 * l;
            let g = |eta: f64| -> f64 {
                match node_eval(profile, eta, tol) {
                    Ok((_, f, tau)) => f + c * tau - target,
                    Err(_) => f64::NAN,
                }
            };
            let eta = brent(g, e0, e1, 1e-12)?;
            let (_, _, tau) = node_eval(profile, eta, tol)?;
            Ok(FixedPoint { eta, k, length: tau })
        })
        .collect();
    let mut points = exact;
    points.extend(refined?);
    points.sort_by(|p, q| p.eta.total_cmp(&q.eta));
    Ok(FixedPoints { points, continuum: None })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Prop1Outcome {
    HypothesisFailed {
        integral: f64,
        bound: f64,
    },
    Found {
        integral: f64,
        bound: f64,
        /// Minimizer of F on (−1, 0].
        eta_bar: f64,
        f_bar: f64,
        /// L/(1 + a·r_min), which F(η̄) must undercut.
        ell0: f64,
        /// Largest critical point of F_a below η̄.
        eta_hat: f64,
        tau_hat: f64,
        /// F(η̂)/(1 − a·r_min·η̂); equals τ(η̂) at a critical point.
        g_hat: f64,
        /// The sign change was found only in (−1, −1+ε), outside the tabulated range.
        in_clamped_margin: bool,
    },
}

impl Prop1Outcome {
    pub fn hypothesis_holds(&self) -> bool {
        matches!(self, Prop1Outcome::Found { .. })
    }
}

/// Extra nodes probed below the table when no sign change of F_a′ is found on it.
const MARGIN_PROBES: [f64; 3] = [-0.9995, -0.9999, -0.99999];

/// For a < 0 the search runs on the mirrored problem with |a| and reports η̄, η̂ mapped back by η ↦ −η.
pub fn prop1_search(profile: &ProfileCurve, ft: &FinslerTable) -> Result<Prop1Outcome> {
    if ft.a == 0.0 {
        return Err(Error::InvalidParam("prop1 search needs a nonzero wind".into()));
    }
    if ft.a < 0.0 {
        let mirrored = build_finsler_table(&ft.base, -ft.a)?;
        return Ok(match prop1_search(profile, &mirrored)? {
            Prop1Outcome::Found {
                integral,
                bound,
                eta_bar,
                f_bar,
                ell0,
                eta_hat,
                tau_hat,
                g_hat,
                in_clamped_margin,
            } => Prop1Outcome::Found {
                integral,
                bound,
                eta_bar: if eta_bar == 0.0 { 0.0 } else { -eta_bar },
                f_bar,
                ell0,
                eta_hat: -eta_hat,
                tau_hat,
                g_hat,
                in_clamped_margin,
            },
            failed => failed,
        });
    }
    let l = ft.l;
    let c = ft.a * ft.r_min;
    let integral = ft.base.integral_0_1();
    let bound = 0.5 * l * (1.0 + 1.0 / ((1.0 + c) * (1.0 + c)));
    if integral > bound {
        return Ok(Prop1Outcome::HypothesisFailed { integral, bound });
    }
    let tol = ft.base.spec.ode_tol;
    let rows: Vec<&FinslerRow> = ft.interior().iter().filter(|r| r.eta <= 0.0).collect();
    // Walk from η = 0 leftwards so that ties resolve toward 0.
    let mut best = rows.len() - 1;
    for i in (0..rows.len()).rev() {
        if rows[i].big_f < rows[best].big_f {
            best = i;
        }
    }
    let (eta_bar, f_bar) = if best == rows.len() - 1 {
        (0.0, rows[best].big_f)
    } else {
        let lo = rows[best.saturating_sub(1)].eta;
        let hi = rows[best + 1].eta;
        let (x, fx) =
            golden_min(|eta| node_eval(profile, eta, tol).map(|v| v.0).unwrap_or(f64::INFINITY), lo, hi, 1e-10);
        if fx <= rows[best].big_f {
            (x, fx)
        } else {
            (rows[best].eta, rows[best].big_f)
        }
    };
    let fa_prime = |eta: f64| -> f64 {
        match node_eval(profile, eta, tol) {
            Ok((_, f, tau)) => f + c * tau,
            Err(_) => f64::NAN,
        }
    };
    // Grid nodes strictly left of η̄, nearest first; the value at η̄ itself is c·τ(η̄) > 0.
    let mut right = (eta_bar, if eta_bar == 0.0 { c * profile.meridian_length() } else { fa_prime(eta_bar) });
    let mut bracket = None;
    for r in rows.iter().rev().filter(|r| r.eta < eta_bar) {
        if r.fa_prime <= 0.0 {
            bracket = Some((r.eta, right.0, false));
            break;
        }
        right = (r.eta, r.fa_prime);
    }
    if bracket.is_none() {
        for &eta in &MARGIN_PROBES {
            let v = fa_prime(eta);
            if v <= 0.0 {
                bracket = Some((eta, right.0, true));
                break;
            }
            right = (eta, v);
        }
    }
    let Some((lo, hi, in_clamped_margin)) = bracket else {
        return Err(Error::Numerical("hypothesis holds but F_a' has no sign change below the minimizer of F".into()));
    };
    let eta_hat = brent(fa_prime, lo, hi, 1e-12)?;
    let (big_f_hat, _, tau_hat) = node_eval(profile, eta_hat, tol)?;
    Ok(Prop1Outcome::Found {
        integral,
        bound,
        eta_bar,
        f_bar,
        ell0: l / (1.0 + c),
        eta_hat,
        tau_hat,
        g_hat: big_f_hat / (1.0 - c * eta_hat),
        in_clamped_margin,
    })
}
