//! Arc-length tabulation of parametric and tangent-angle curves onto a uniform s grid.

use crate::error::{Error, Result};
use crate::numeric::hermite::QuinticTable;
use crate::numeric::quad::kronrod15;
use crate::numeric::roots::newton_bracketed;

/// A regular parametric generating curve t ↦ (r(t), z(t)) from south pole to north pole.
pub trait ParamCurve {
    fn domain(&self) -> (f64, f64);

    /// Parameters where the curve may lose smoothness; must include the domain ends.
    fn breaks(&self) -> Vec<f64> {
        let (a, b) = self.domain();
        vec![a, b]
    }

    /// [r, z, r_t, z_t, r_tt, z_tt]
    fn eval(&self, t: f64) -> [f64; 6];
}

/// Resample by arc length onto `n` uniform segments.
pub fn tabulate_param<C: ParamCurve + ?Sized>(c: &C, n: usize) -> Result<(QuinticTable, QuinticTable)> {
    let speed = |t: f64| {
        let v = c.eval(t);
        v[2].hypot(v[3])
    };
    let breaks = c.breaks();
    let (t0, t1) = c.domain();
    let span = t1 - t0;
    let panels_total = 4 * n;

    let mut tp = vec![breaks[0]];
    for w in breaks.windows(2) {
        let m = ((panels_total as f64 * (w[1] - w[0]) / span).ceil() as usize).max(4);
        for k in 1..=m {
            tp.push(if k == m { w[1] } else { w[0] + (w[1] - w[0]) * k as f64 / m as f64 });
        }
    }
    let mut cum = vec![0.0; tp.len()];
    for j in 1..tp.len() {
        cum[j] = cum[j - 1] + kronrod15(&speed, tp[j - 1], tp[j]);
    }
    let total = *cum.last().unwrap();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Degenerate("curve has no length".into()));
    }
    let min_speed = tp.iter().skip(1).take(tp.len() - 2).map(|&t| speed(t)).fold(f64::INFINITY, f64::min);
    if min_speed <= 1e-12 * total / span {
        return Err(Error::Degenerate("tangent vanishes in the interior".into()));
    }

    let h = total / n as f64;
    let mut r = vec![0.0; n + 1];
    let mut dr = vec![0.0; n + 1];
    let mut ddr = vec![0.0; n + 1];
    let mut z = vec![0.0; n + 1];
    let mut dz = vec![0.0; n + 1];
    let mut ddz = vec![0.0; n + 1];
    let mut j = 0;
    for i in 0..=n {
        let s = i as f64 * h;
        let t = if i == 0 {
            t0
        } else if i == n {
            t1
        } else {
            while j + 2 < tp.len() && cum[j + 1] < s {
                j += 1;
            }
            let (ta, tb, sa) = (tp[j], tp[j + 1], cum[j]);
            newton_bracketed(|t| (sa + kronrod15(&speed, ta, t) - s, speed(t)), ta, tb, 1e-15 * span)?
        };
        let v = c.eval(t);
        let sig = v[2].hypot(v[3]);
        let sig_t = (v[2] * v[4] + v[3] * v[5]) / sig;
        r[i] = v[0];
        z[i] = v[1];
        dr[i] = v[2] / sig;
        dz[i] = v[3] / sig;
        ddr[i] = (v[4] * sig - v[2] * sig_t) / sig.powi(3);
        ddz[i] = (v[5] * sig - v[3] * sig_t) / sig.powi(3);
    }
    Ok((QuinticTable::new(0.0, h, &r, &dr, &ddr), QuinticTable::new(0.0, h, &z, &dz, &ddz)))
}

/// Tabulate a curve given by its tangent angle ψ(u) against arc length u:
/// r′ = cos ψ, z′ = sin ψ, r(0) = 0. `psi` returns (ψ, ψ′).
pub fn tabulate_angle<P: Fn(f64) -> (f64, f64)>(
    psi: &P,
    total: f64,
    z0: f64,
    n: usize,
) -> (QuinticTable, QuinticTable) {
    let h = total / n as f64;
    let cosp = |u: f64| psi(u).0.cos();
    let sinp = |u: f64| psi(u).0.sin();
    let mut r = vec![0.0; n + 1];
    let mut dr = vec![0.0; n + 1];
    let mut ddr = vec![0.0; n + 1];
    let mut z = vec![z0; n + 1];
    let mut dz = vec![0.0; n + 1];
    let mut ddz = vec![0.0; n + 1];
    for i in 0..=n {
        let u = i as f64 * h;
        if i > 0 {
            let a = (i - 1) as f64 * h;
            r[i] = r[i - 1] + kronrod15(&cosp, a, u);
            z[i] = z[i - 1] + kronrod15(&sinp, a, u);
        }
        let (p, dp) = psi(u);
        dr[i] = p.cos();
        dz[i] = p.sin();
        ddr[i] = -p.sin() * dp;
        ddz[i] = p.cos() * dp;
    }
    (QuinticTable::new(0.0, h, &r, &dr, &ddr), QuinticTable::new(0.0, h, &z, &dz, &ddz))
}
