//! Not-a-knot cubic spline on an arbitrary increasing grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    // Second derivatives at the knots.
    m: Vec<f64>,
    // Running integral from x[0] to each knot.
    cum: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() || n < 4 {
            return Err(Error::InvalidParam("spline needs at least four samples of matching length".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParam("spline abscissae must increase strictly".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Interior equations h[i-1] m[i-1] + 2(h[i-1]+h[i]) m[i] + h[i] m[i+1] = 6(d[i]-d[i-1]),
        // closed by not-a-knot: m0 and m_{n-1} eliminated via third-derivative continuity.
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut dia = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1;
            sub[j] = h[i - 1];
            dia[j] = 2.0 * (h[i - 1] + h[i]);
            sup[j] = h[i];
            rhs[j] = 6.0 * (d[i] - d[i - 1]);
        }
        // m0 = ((h0+h1) m1 - h0 m2)/h1
        let (h0, h1) = (h[0], h[1]);
        dia[0] += h0 * (h0 + h1) / h1;
        sup[0] -= h0 * h0 / h1;
        // m_{n-1} = ((h_{n-2}+h_{n-3}) m_{n-2} - h_{n-2} m_{n-3}) / h_{n-3}
        let (ha, hb) = (h[n - 2], h[n - 3]);
        dia[k - 1] += ha * (ha + hb) / hb;
        sub[k - 1] -= ha * ha / hb;

        let inner = solve_tridiagonal(&sub, &dia, &sup, &rhs);
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(&inner);
        m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
        m[n - 1] = ((ha + hb) * m[n - 2] - ha * m[n - 3]) / hb;

        let mut cum = vec![0.0; n];
        for i in 0..n - 1 {
            let hi = h[i];
            cum[i + 1] = cum[i] + 0.5 * hi * (y[i] + y[i + 1]) - hi.powi(3) * (m[i] + m[i + 1]) / 24.0;
        }
        Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m, cum })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Value and first two derivatives.
    pub fn eval3(&self, t: f64) -> (f64, f64, f64) {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval3(t).0
    }

    /// Integral from x[0] to t.
    pub fn integral_to(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let u = t - self.x[i];
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        // Antiderivative of the segment cubic, measured from x[i].
        let b = u / h;
        let a0 = 1.0 - b;
        let lin = h * (y0 * (1.0 - a0 * a0) / 2.0 + y1 * b * b / 2.0);
        let cub = h.powi(3) / 6.0
            * (m0 * (-(a0.powi(4) - 1.0) / 4.0 + (a0 * a0 - 1.0) / 2.0) + m1 * (b.powi(4) / 4.0 - b * b / 2.0));
        self.cum[i] + lin + cub
    }
}

/// Thomas algorithm; the systems built here are diagonally dominant.
pub fn solve_tridiagonal(sub: &[f64], dia: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = dia.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / dia[0];
    d[0] = rhs[0] / dia[0];
    for i in 1..n {
        let den = dia[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / den;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let x: Vec<f64> = [0.0, 0.3, 0.35, 1.0, 1.7, 2.0].to_vec();
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t * t;
        let y: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for &t in &[0.1, 0.7, 1.3, 1.99] {
            let (v, d, dd) = s.eval3(t);
            assert!((v - p(t)).abs() < 1e-12);
            assert!((d - (-2.0 + 1.5 * t * t)).abs() < 1e-11);
            assert!((dd - 3.0 * t).abs() < 1e-10);
            let exact = t - t * t + t.powi(4) / 8.0;
            assert!((s.integral_to(t) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn converges_on_sine() {
        let n = 200;
        let x: Vec<f64> = (0..n).map(|i| i as f64 * 3.0 / (n - 1) as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        assert!((s.eval(1.234) - 1.234f64.sin()).abs() < 1e-8);
        assert!((s.integral_to(3.0) - (1.0 - 3f64.cos())).abs() < 1e-9);
    }
}
