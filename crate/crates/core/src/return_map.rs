//! First return to the Birkhoff annulus of the minimal equator and the generating function F.
//!
//! Annulus coordinates: ξ along the equator s = s0, η = −cos β. The return map is
//! (ξ, η) ↦ (ξ + f(η), η) with f = F′, and τ = F − ηF′ is the return time.

use crate::error::{Error, Result};
use crate::geodesic::{flow, NavigationParams, UnitTangentState};
use crate::numeric::ode::locate_event;
use crate::numeric::quad::{integrate, integrate_sqrt_ends, QuadTol};
use crate::numeric::roots::newton_bracketed;
use crate::numeric::spline::CubicSpline;
use crate::profile::ProfileCurve;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstReturn {
    pub eta: f64,
    pub tau: f64,
    pub theta_advance: f64,
    pub winding: f64,
}

/// Return-time horizon in units of M; existence is guaranteed, so hitting it is a numerical failure.
const HORIZON_MERIDIANS: f64 = 50.0;

pub fn first_return(eta: f64, profile: &ProfileCurve, tol: f64) -> Result<FirstReturn> {
    if !(eta.abs() < 1.0) {
        return Err(Error::InvalidParam(format!("eta must lie in (-1, 1), got {eta}")));
    }
    let m = profile.meridian_length();
    if eta == 0.0 {
        return Ok(FirstReturn { eta, tau: m, theta_advance: 0.0, winding: 0.0 });
    }
    let s0 = profile.s0();
    let start = UnitTangentState::new(0.0, (-eta).acos(), s0);
    let mut ode = flow(&start, profile, &NavigationParams::riemannian(), tol)?;
    let horizon = HORIZON_MERIDIANS * m;
    while ode.t() < horizon {
        let before = ode.y()[2] - s0;
        ode.step(horizon)?;
        let after = ode.y()[2] - s0;
        if before < 0.0 && after >= 0.0 {
            let d = ode.dense()?;
            let t = locate_event(d, |y| y[2] - s0, d.t_old, d.t_new(), 1e-12);
            let y = d.eval(t);
            return Ok(FirstReturn { eta, tau: t, theta_advance: y[0], winding: y[0] / TAU });
        }
    }
    Err(Error::NoReturn(eta))
}

/// f = LW + L for η > 0 and LW − L for η < 0; f(0) = 0.
pub fn f_from_winding(eta: f64, winding: f64, l: f64) -> f64 {
    if eta > 0.0 {
        l * winding + l
    } else if eta < 0.0 {
        l * winding - l
    } else {
        0.0
    }
}

pub(crate) fn quad_tol(profile: &ProfileCurve) -> QuadTol {
    QuadTol { abs: 1e-12 * profile.half_length(), rel: 1e-13, max_panels: 40_000 }
}

/// Maximal intervals of monotonicity of r on [0, M/2], split at the critical points.
fn monotone_pieces(profile: &ProfileCurve) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0];
    cuts.extend(profile.equators().iter().map(|e| e.s_c));
    cuts.push(profile.half_length());
    cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
}

/// Chunks per half meridian: a single Gauss–Kronrod panel over a long piece can miss a
/// narrow feature such as a fillet and still report a small error.
pub(crate) const CHUNKS: f64 = 512.0;

/// ∫ g over [a, b] in chunks no longer than `width`; a square-root endpoint singularity is
/// confined to the end chunk and removed there by substitution.
pub(crate) fn chunked(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    sing: Option<bool>,
    width: f64,
    tol: QuadTol,
) -> Result<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == n { b } else { lo + h };
        let left = sing == Some(true) && i == 0;
        let right = sing == Some(false) && i + 1 == n;
        total += if left || right {
            integrate_sqrt_ends(&g, lo, hi, left, right, tol)?
        } else {
            integrate(&g, lo, hi, tol)?
        };
    }
    Ok(total)
}

/// ∫ g(s) over {s : r(s) > κ}; g may carry a square-root singularity where r = κ.
fn integrate_above(profile: &ProfileCurve, kappa: f64, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    let tol = quad_tol(profile);
    let width = profile.half_length() / CHUNKS;
    let mut total = 0.0;
    for (a, b) in monotone_pieces(profile) {
        let (ra, rb) = (profile.r(a), profile.r(b));
        total += match (ra > kappa, rb > kappa) {
            (false, false) => 0.0,
            (true, true) => chunked(g, a, b, None, width, tol)?,
            (above_a, _) => {
                let root =
                    newton_bracketed(|s| (profile.r(s) - kappa, profile.dr(s)), a, b, 1e-15 * profile.half_length())?;
                if above_a {
                    chunked(g, a, root, Some(false), width, tol)?
                } else {
                    chunked(g, root, b, Some(true), width, tol)?
                }
            }
        };
    }
    Ok(total)
}

/// 2√(1 − κ²/r²) written to keep accuracy as r → κ.
fn cos_slice(r: f64, kappa: f64) -> f64 {
    if r <= kappa {
        return 0.0;
    }
    2.0 * ((r - kappa) * (r + kappa)).sqrt() / r
}

/// F(η) = L|η| + ∫_{r>κ} 2√(1 − κ²/r²) ds with κ = r_min|η|, valid on the closed interval [−1, 1].
pub fn generating_area(eta: f64, profile: &ProfileCurve) -> Result<f64> {
    if !(eta.abs() <= 1.0) {
        return Err(Error::InvalidParam(format!("eta must lie in [-1, 1], got {eta}")));
    }
    let l = profile.minimal_equator().length;
    let kappa = profile.r_min() * eta.abs();
    if kappa == 0.0 {
        return Ok(profile.meridian_length());
    }
    let g = |s: f64| cos_slice(profile.r(s), kappa);
    Ok(l * eta.abs() + integrate_above(profile, kappa, &g)?)
}

/// Integrals over Γ = {r cos β ≥ r_min} of cos β dβ∧ds and r dβ∧ds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaIntegrals {
    pub cos_part: f64,
    pub r_part: f64,
}

pub fn gamma_integrals(profile: &ProfileCurve) -> Result<GammaIntegrals> {
    let k = profile.r_min();
    let cos_part = integrate_above(profile, k, &|s: f64| cos_slice(profile.r(s), k))?;
    let r_part = integrate_above(profile, k, &|s: f64| {
        let r = profile.r(s);
        if r <= k {
            0.0
        } else {
            2.0 * r * (k / r).acos()
        }
    })?;
    Ok(GammaIntegrals { cos_part, r_part })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeMethod {
    Ode,
    Area,
    Analytic,
}

impl NodeMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeMethod::Ode => "ode",
            NodeMethod::Area => "area",
            NodeMethod::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Uniform interior nodes on [−1+ε, 1−ε]; forced odd so that η = 0 is a node.
    pub nodes: usize,
    pub eps: f64,
    pub ode_tol: f64,
    /// Allowed |F_ode − F_area| at any node.
    pub crosscheck_tol: f64,
    /// Rounds of panel bisection where the disagreement of the two F routes grows faster than tol/10 per unit η.
    pub refine_rounds: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nodes: 201, eps: 1e-3, ode_tol: 1e-10, crosscheck_tol: 1e-5, refine_rounds: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratingRow {
    pub eta: f64,
    /// F from the return data: M + ∫₀^η f.
    #[serde(rename = "F")]
    pub big_f: f64,
    pub f: f64,
    pub tau: f64,
    #[serde(rename = "W")]
    pub winding: f64,
    pub method: NodeMethod,
    #[serde(rename = "F_area")]
    pub big_f_area: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratingTable {
    pub rows: Vec<GeneratingRow>,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub r_min: f64,
    pub gamma: GammaIntegrals,
    pub spec: GridSpec,
}

/// Return data at one interior node.
fn ode_row(eta: f64, profile: &ProfileCurve, tol: f64) -> Result<(f64, f64, f64, f64)> {
    let l = profile.minimal_equator().length;
    if eta == 0.0 {
        return Ok((0.0, profile.meridian_length(), 0.0, profile.meridian_length()));
    }
    let ret = first_return(eta, profile, tol)?;
    let f = f_from_winding(eta, ret.winding, l);
    Ok((f, ret.tau, ret.winding, generating_area(eta, profile)?))
}

/// Primitive of f through interior nodes, anchored at F(0) = M.
fn primitive(etas: &[f64], fs: &[f64], m: f64) -> Result<Vec<f64>> {
    let spline = CubicSpline::new(etas, fs)?;
    let at_zero = spline.integral_to(0.0);
    Ok(etas.iter().map(|&e| m + spline.integral_to(e) - at_zero).collect())
}

pub fn build_generating_table(profile: &ProfileCurve, spec: &GridSpec) -> Result<GeneratingTable> {
    if spec.nodes < 21 {
        return Err(Error::InvalidParam(format!("grid needs at least 21 nodes, got {}", spec.nodes)));
    }
    if !(spec.eps > 0.0 && spec.eps < 0.5) {
        return Err(Error::InvalidParam(format!("eps must lie in (0, 0.5), got {}", spec.eps)));
    }
    let l = profile.minimal_equator().length;
    let m = profile.meridian_length();
    let n = spec.nodes | 1;
    let half = (n - 1) / 2;
    let edge = 1.0 - spec.eps;
    // Symmetric grid: negative nodes are exact negations of positive ones.
    let positive: Vec<f64> = (1..=half).map(|i| edge * i as f64 / half as f64).collect();
    let mut etas: Vec<f64> = positive.iter().rev().map(|e| -e).collect();
    etas.push(0.0);
    etas.extend(&positive);

    let eval = |etas: &[f64]| -> Result<Vec<(f64, f64, f64, f64)>> {
        etas.par_iter().map(|&e| ode_row(e, profile, spec.ode_tol)).collect()
    };
    let mut data = eval(&etas)?;
    for _ in 0..spec.refine_rounds {
        let fs: Vec<f64> = data.iter().map(|d| d.0).collect();
        let big_f = primitive(&etas, &fs, m)?;
        let gap: Vec<f64> = (0..etas.len()).map(|i| big_f[i] - data[i].3).collect();
        // The primitive accumulates error outward from η = 0, so judge each panel by the
        // growth of the discrepancy across it rather than by its value.
        let mut extra: Vec<f64> = (0..etas.len() - 1)
            .filter(|&j| etas[j + 1] > 0.0)
            .filter(|&j| {
                let h = etas[j + 1] - etas[j];
                (gap[j + 1] - gap[j]).abs() > 0.1 * spec.crosscheck_tol * h.max(1e-3)
            })
            .map(|j| 0.5 * (etas[j] + etas[j + 1]))
            .collect();
        if extra.is_empty() {
            break;
        }
        extra.sort_by(f64::total_cmp);
        let mirrored: Vec<f64> = extra.iter().flat_map(|&e| [e, -e]).collect();
        let new_data = eval(&mirrored)?;
        let mut merged: Vec<(f64, (f64, f64, f64, f64))> =
            etas.iter().copied().zip(data).chain(mirrored.into_iter().zip(new_data)).collect();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        merged.dedup_by(|a, b| a.0 == b.0);
        etas = merged.iter().map(|x| x.0).collect();
        data = merged.into_iter().map(|x| x.1).collect();
    }
    let fs: Vec<f64> = data.iter().map(|d| d.0).collect();
    let big_f = primitive(&etas, &fs, m)?;

    let gamma = gamma_integrals(profile)?;
    let f_end = l + gamma.cos_part;
    let endpoint = |eta: f64| GeneratingRow {
        eta,
        big_f: f_end,
        f: f64::NAN,
        tau: f64::NAN,
        winding: f64::NAN,
        method: NodeMethod::Area,
        big_f_area: f_end,
    };
    let mut rows = vec![endpoint(-1.0)];
    for (i, &eta) in etas.iter().enumerate() {
        let (f, tau, winding, fa) = data[i];
        rows.push(GeneratingRow {
            eta,
            big_f: big_f[i],
            f,
            tau,
            winding,
            method: if eta == 0.0 { NodeMethod::Analytic } else { NodeMethod::Ode },
            big_f_area: fa,
        });
    }
    rows.push(endpoint(1.0));
    let table = GeneratingTable { rows, l, m, r_min: profile.r_min(), gamma, spec: *spec };
    let (eta, disc) = table.worst_crosscheck();
    if !(disc <= spec.crosscheck_tol) {
        return Err(Error::CrossCheck { what: "F_ode vs F_area", eta, discrepancy: disc, tol: spec.crosscheck_tol });
    }
    Ok(table)
}

impl GeneratingTable {
    /// Rows with ODE or analytic return data, i.e. everything except η = ±1.
    pub fn interior(&self) -> &[GeneratingRow] {
        &self.rows[1..self.rows.len() - 1]
    }

    pub fn f_end(&self) -> f64 {
        self.rows[0].big_f
    }

    /// Node and size of the largest |F_ode − F_area|.
    pub fn worst_crosscheck(&self) -> (f64, f64) {
        self.interior().iter().map(|r| (r.eta, (r.big_f - r.big_f_area).abs())).fold((0.0, 0.0), |acc, x| {
            if x.1 > acc.1 {
                x
            } else {
                acc
            }
        })
    }

    /// max |τ − (F − ηf)| over interior nodes.
    pub fn genfun_defect(&self) -> f64 {
        self.interior().iter().map(|r| (r.tau - (r.big_f - r.eta * r.f)).abs()).fold(0.0, f64::max)
    }

    /// max |F − L| over all nodes, endpoints included.
    pub fn max_deviation_from_l(&self) -> f64 {
        self.rows.iter().map(|r| (r.big_f - self.l).abs()).fold(0.0, f64::max)
    }

    /// ∫₀¹ F dη: corrected trapezoid on the interior nodes, plain trapezoid on the last panel up to F(1).
    pub fn integral_0_1(&self) -> f64 {
        let rows: Vec<&GeneratingRow> = self.interior().iter().filter(|r| r.eta >= 0.0).collect();
        let mut acc = 0.0;
        for w in rows.windows(2) {
            let h = w[1].eta - w[0].eta;
            acc += 0.5 * h * (w[0].big_f + w[1].big_f) + h * h * (w[0].f - w[1].f) / 12.0;
        }
        let last = rows[rows.len() - 1];
        acc + 0.5 * (1.0 - last.eta) * (last.big_f + self.f_end())
    }

    /// Interpolated (F, f, τ) at an interior η by cubic splines through the nodes.
    pub fn interpolator(&self) -> Result<TableSplines> {
        let rows = self.interior();
        let x: Vec<f64> = rows.iter().map(|r| r.eta).collect();
        let col = |g: fn(&GeneratingRow) -> f64| CubicSpline::new(&x, &rows.iter().map(g).collect::<Vec<_>>());
        Ok(TableSplines { big_f: col(|r| r.big_f)?, f: col(|r| r.f)?, tau: col(|r| r.tau)? })
    }

    /// Export `eta,F,f,tau,W,method`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["eta", "F", "f", "tau", "W", "method"])?;
        for r in &self.rows {
            w.write_record([
                r.eta.to_string(),
                r.big_f.to_string(),
                r.f.to_string(),
                r.tau.to_string(),
                r.winding.to_string(),
                r.method.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub struct TableSplines {
    pub big_f: CubicSpline,
    pub f: CubicSpline,
    pub tau: CubicSpline,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_sphere_returns() {
        let p = ProfileCurve::round(1.0).unwrap();
        let r = first_return(0.5, &p, 1e-10).unwrap();
        assert!((r.tau - TAU).abs() < 1e-8, "{r:?}");
        assert!((r.winding + 1.0).abs() < 1e-8);
        let r = first_return(-0.5, &p, 1e-10).unwrap();
        assert!((r.tau - TAU).abs() < 1e-8 && (r.winding - 1.0).abs() < 1e-8);
        let r = first_return(0.0, &p, 1e-10).unwrap();
        assert_eq!(r.tau, TAU);
    }

    #[test]
    fn winding_formula() {
        assert!(f_from_winding(0.5, -1.0, TAU).abs() < 1e-15);
        assert!(f_from_winding(-0.5, 1.0, TAU).abs() < 1e-15);
        assert!((f_from_winding(0.3, -0.8, 5.0) - 1.0).abs() < 1e-14);
        assert_eq!(f_from_winding(0.0, 0.7, 5.0), 0.0);
    }

    #[test]
    fn area_form_on_round_sphere() {
        let p = ProfileCurve::round(1.0).unwrap();
        for &eta in &[-1.0, -0.7, -0.2, 0.0, 0.1, 0.5, 0.999, 1.0] {
            assert!((generating_area(eta, &p).unwrap() - TAU).abs() < 1e-10, "{eta}");
        }
    }

    #[test]
    fn area_form_matches_brute_force_on_oblate() {
        let p = ProfileCurve::ellipsoid(1.0, 0.5).unwrap();
        let l = p.minimal_equator().length;
        let eta = 0.4;
        let kappa = p.r_min() * eta;
        // Midpoint rule over the whole meridian with the integrand zeroed where r ≤ κ.
        let n = 400_000;
        let h = p.half_length() / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let r = p.r((i as f64 + 0.5) * h);
            if r > kappa {
                acc += 2.0 * (1.0 - kappa * kappa / (r * r)).sqrt() * h;
            }
        }
        assert!((generating_area(eta, &p).unwrap() - (l * eta + acc)).abs() < 1e-7);
    }

    #[test]
    fn gamma_vanishes_on_round_and_oblate() {
        for p in [ProfileCurve::round(1.0).unwrap(), ProfileCurve::ellipsoid(1.0, 0.5).unwrap()] {
            let g = gamma_integrals(&p).unwrap();
            assert!(g.cos_part.abs() < 1e-12 && g.r_part.abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_positive_on_peanut() {
        let p = ProfileCurve::peanut(1.0, 1.0, 1.5).unwrap();
        let g = gamma_integrals(&p).unwrap();
        assert!(g.cos_part > 0.0 && g.r_part > 0.0, "{g:?}");
        let f1 = generating_area(1.0, &p).unwrap();
        assert!((f1 - p.minimal_equator().length - g.cos_part).abs() < 1e-12);
    }

    #[test]
    fn round_table_is_constant() {
        let p = ProfileCurve::round(1.0).unwrap();
        let spec = GridSpec { nodes: 101, ..GridSpec::default() };
        let t = build_generating_table(&p, &spec).unwrap();
        assert_eq!(t.rows.len(), 103);
        for r in &t.rows {
            assert!((r.big_f - TAU).abs() < 1e-6, "{r:?}");
            if r.f.is_finite() {
                assert!(r.f.abs() < 1e-6);
            }
        }
        assert!((t.integral_0_1() - TAU).abs() < 1e-6);
        assert!(t.genfun_defect() < 1e-6);
        assert!((t.m - 2.0 * PI).abs() < 1e-15);
    }
}
