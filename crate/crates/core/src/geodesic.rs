//! Geodesic flow of r²dθ² + ds² with rotational wind a·∂θ, in (θ, β, s) coordinates.
//!
//! θ̇ = cos β / r + a,  β̇ = r′ cos β / r,  ṡ = sin β.  The wind only enters θ̇.

use crate::error::{Error, Result};
use crate::numeric::ode::{locate_event, DenseStep, Dop853, OdeOptions};
use crate::profile::ProfileCurve;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

/// θ is kept unwrapped so that winding is total advance / 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangentState {
    pub theta: f64,
    pub beta: f64,
    pub s: f64,
}

impl UnitTangentState {
    pub fn new(theta: f64, beta: f64, s: f64) -> Self {
        UnitTangentState { theta, beta, s }
    }

    pub fn theta_mod(&self) -> f64 {
        self.theta.rem_euclid(TAU)
    }

    pub fn beta_mod(&self) -> f64 {
        self.beta.rem_euclid(TAU)
    }

    fn as_array(&self) -> [f64; 3] {
        [self.theta, self.beta, self.s]
    }

    fn from_array(y: &[f64; 3]) -> Self {
        UnitTangentState::new(y[0], y[1], y[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavigationParams {
    pub a: f64,
}

impl NavigationParams {
    pub fn new(a: f64) -> Self {
        NavigationParams { a }
    }

    pub fn riemannian() -> Self {
        NavigationParams { a: 0.0 }
    }

    /// |a|·r_max < 1 keeps the translated unit circles around the origin.
    pub fn validate(&self, profile: &ProfileCurve) -> Result<()> {
        let k = self.a.abs() * profile.r_max();
        if !(k < 1.0) || !self.a.is_finite() {
            return Err(Error::WindTooStrong(k));
        }
        Ok(())
    }
}

fn field(profile: &ProfileCurve, a: f64, y: &[f64; 3]) -> [f64; 3] {
    let p = profile.point(y[2]);
    let (sb, cb) = y[1].sin_cos();
    [cb / p.r + a, p.dr * cb / p.r, sb]
}

pub fn reeb_field(state: &UnitTangentState, profile: &ProfileCurve, nav: &NavigationParams) -> Result<[f64; 3]> {
    if !(state.s > 0.0 && state.s < profile.half_length()) {
        return Err(Error::Pole(state.s));
    }
    Ok(field(profile, nav.a, &state.as_array()))
}

/// K = r(s) cos β; zero at the poles.
pub fn clairaut(state: &UnitTangentState, profile: &ProfileCurve) -> f64 {
    if state.s <= 0.0 || state.s >= profile.half_length() {
        return 0.0;
    }
    profile.r(state.s) * state.beta.cos()
}

/// G_a of the tangent vector A∂θ + B∂s at arc length s.
pub fn finsler_norm(profile: &ProfileCurve, nav: &NavigationParams, s: f64, a_comp: f64, b_comp: f64) -> Result<f64> {
    if a_comp == 0.0 && b_comp == 0.0 {
        return Err(Error::ZeroVector);
    }
    let r = profile.r(s);
    let ra = r * nav.a;
    if !(ra.abs() < 1.0) {
        return Err(Error::WindTooStrong(ra.abs()));
    }
    let q = 1.0 - ra * ra;
    let root = (r * r * a_comp * a_comp + q * b_comp * b_comp).sqrt();
    Ok((root - r * ra * a_comp) / q)
}

/// Default integrator options for a profile: tolerance `tol` and a step cap tied to the meridian length.
pub fn ode_options(profile: &ProfileCurve, tol: f64) -> OdeOptions {
    OdeOptions { rtol: tol, atol: tol, h_max: profile.meridian_length() / 32.0, ..OdeOptions::default() }
}

/// Build the integrator at `state`; meridians (K = 0) are rejected since the chart degenerates at the poles.
#[allow(clippy::type_complexity)]
pub fn flow<'a>(
    state: &UnitTangentState,
    profile: &'a ProfileCurve,
    nav: &NavigationParams,
    tol: f64,
) -> Result<Dop853<3, impl FnMut(f64, &[f64; 3]) -> [f64; 3] + 'a>> {
    if !(state.s > 0.0 && state.s < profile.half_length()) {
        return Err(Error::Pole(state.s));
    }
    let k = clairaut(state, profile);
    if k.abs() <= 1e-14 * profile.r_max() {
        return Err(Error::Pole(state.s));
    }
    let a = nav.a;
    Dop853::new(move |_t, y: &[f64; 3]| field(profile, a, y), 0.0, state.as_array(), ode_options(profile, tol))
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<DenseStep<3>>,
    start: UnitTangentState,
    end: UnitTangentState,
    k0: f64,
    max_drift: f64,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |d| d.t_new())
    }

    pub fn start(&self) -> UnitTangentState {
        self.start
    }

    pub fn end(&self) -> UnitTangentState {
        self.end
    }

    pub fn clairaut_initial(&self) -> f64 {
        self.k0
    }

    /// Largest |K(t) − K(0)| seen at the accepted steps.
    pub fn max_clairaut_drift(&self) -> f64 {
        self.max_drift
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Dense-output state at any t in [0, t_end].
    pub fn at(&self, t: f64) -> UnitTangentState {
        if t >= self.t_end() {
            return self.end;
        }
        let i = self.steps.partition_point(|d| d.t_new() < t);
        UnitTangentState::from_array(&self.steps[i.min(self.steps.len() - 1)].eval(t))
    }

    /// `n` + 1 uniform samples (t, state, K).
    pub fn sample(&self, profile: &ProfileCurve, n: usize) -> Vec<(f64, UnitTangentState, f64)> {
        let te = self.t_end();
        (0..=n)
            .map(|i| {
                let t = if i == n { te } else { te * i as f64 / n as f64 };
                let st = self.at(t);
                (t, st, clairaut(&st, profile))
            })
            .collect()
    }

    /// Export `t,theta,beta,s,K`.
    pub fn write_csv(&self, profile: &ProfileCurve, path: &Path, n: usize) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "theta", "beta", "s", "K"])?;
        for (t, st, k) in self.sample(profile, n) {
            w.write_record([t, st.theta, st.beta, st.s, k].map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn integrate(
    state: &UnitTangentState,
    profile: &ProfileCurve,
    nav: &NavigationParams,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    nav.validate(profile)?;
    let k0 = clairaut(state, profile);
    let mut ode = flow(state, profile, nav, tol)?;
    let mut steps = Vec::new();
    let mut max_drift: f64 = 0.0;
    while ode.t() < t_end {
        ode.step(t_end)?;
        let y = *ode.y();
        if !(y[2] > 0.0 && y[2] < profile.half_length()) {
            return Err(Error::Pole(y[2]));
        }
        let r = profile.r(y[2]);
        max_drift = max_drift.max((r * y[1].cos() - k0).abs());
        steps.push(ode.dense()?.clone());
    }
    Ok(Trajectory { steps, start: *state, end: UnitTangentState::from_array(ode.y()), k0, max_drift })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum GeodesicClass {
    Meridian { clairaut_value: f64 },
    Equator { s_c: f64, clairaut_value: f64 },
    AsymptoticToEquator { s_c: f64, clairaut_value: f64 },
    Oscillating { s1: f64, s2: f64, clairaut_value: f64 },
    Inconclusive { clairaut_value: f64, reason: String },
}

/// Decide the type of the geodesic through `state` from its s-dynamics within `horizon`
/// (default 20·M). The (β, s) subsystem does not see the wind, so the answer is the same for every a.
pub fn classify(
    state: &UnitTangentState,
    profile: &ProfileCurve,
    nav: &NavigationParams,
    horizon: Option<f64>,
    tol: f64,
) -> Result<GeodesicClass> {
    nav.validate(profile)?;
    let k = clairaut(state, profile);
    if k.abs() <= 1e-14 * profile.r_max() {
        return Ok(GeodesicClass::Meridian { clairaut_value: k });
    }
    let sb = state.beta.sin();
    let p = profile.point(state.s);
    if sb.abs() < 1e-12 && p.dr.abs() < 1e-9 {
        return Ok(GeodesicClass::Equator { s_c: state.s, clairaut_value: k });
    }
    let horizon = horizon.unwrap_or(20.0 * profile.meridian_length());
    let mut ode = flow(state, profile, nav, tol)?;
    let (mut lo, mut hi): (Option<f64>, Option<f64>) = (None, None);
    while ode.t() < horizon {
        let before = ode.y()[1].sin();
        ode.step(horizon)?;
        let y = *ode.y();
        if !(y[2] > 0.0 && y[2] < profile.half_length()) {
            return Err(Error::Pole(y[2]));
        }
        let after = y[1].sin();
        if before != 0.0 && before.signum() != after.signum() {
            let d = ode.dense()?;
            let te = locate_event(d, |y| y[1].sin(), d.t_old, d.t_new(), 1e-13);
            let s_turn = d.eval(te)[2];
            if before < 0.0 {
                lo.get_or_insert(s_turn);
            } else {
                hi.get_or_insert(s_turn);
            }
            if let (Some(s1), Some(s2)) = (lo, hi) {
                return Ok(GeodesicClass::Oscillating { s1, s2, clairaut_value: k });
            }
        }
    }
    let s_end = ode.y()[2];
    let q = profile.point(s_end);
    let scale = profile.half_length();
    if q.dr.abs() < 1e-4 && (q.r - k.abs()).abs() < 1e-6 * scale {
        let nearest = profile.equators().iter().min_by(|a, b| (a.s_c - s_end).abs().total_cmp(&(b.s_c - s_end).abs()));
        if let Some(e) = nearest {
            return Ok(GeodesicClass::AsymptoticToEquator { s_c: e.s_c, clairaut_value: k });
        }
    }
    Ok(GeodesicClass::Inconclusive {
        clairaut_value: k,
        reason: format!("fewer than two turning points within t = {horizon}"),
    })
}
