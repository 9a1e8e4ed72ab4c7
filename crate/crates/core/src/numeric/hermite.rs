//! Piecewise quintic Hermite interpolation on a uniform grid: C² and exact
//! for value, slope and curvature at every knot.

#[derive(Debug, Clone)]
pub struct QuinticTable {
    x0: f64,
    h: f64,
    // Six monomial coefficients per segment in the local variable u = (x − x_i)/h.
    coef: Vec<[f64; 6]>,
}

impl QuinticTable {
    /// `y`, `dy`, `ddy` are samples at x0 + i·h, i = 0..n.
    pub fn new(x0: f64, h: f64, y: &[f64], dy: &[f64], ddy: &[f64]) -> Self {
        let n = y.len();
        assert!(n >= 2 && dy.len() == n && ddy.len() == n);
        let coef = (0..n - 1)
            .map(|i| {
                let a = y[i];
                let b = h * dy[i];
                let c = 0.5 * h * h * ddy[i];
                let big_a = y[i + 1] - a - b - c;
                let big_b = h * dy[i + 1] - b - 2.0 * c;
                let big_c = h * h * ddy[i + 1] - 2.0 * c;
                [
                    a,
                    b,
                    c,
                    10.0 * big_a - 4.0 * big_b + 0.5 * big_c,
                    -15.0 * big_a + 7.0 * big_b - big_c,
                    6.0 * big_a - 3.0 * big_b + 0.5 * big_c,
                ]
            })
            .collect();
        QuinticTable { x0, h, coef }
    }

    pub fn start(&self) -> f64 {
        self.x0
    }

    pub fn end(&self) -> f64 {
        self.x0 + self.h * self.coef.len() as f64
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn segments(&self) -> usize {
        self.coef.len()
    }

    /// Value, first and second derivative; arguments outside the table use the end segments' polynomials.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let t = (x - self.x0) / self.h;
        let i = (t.floor().max(0.0) as usize).min(self.coef.len() - 1);
        let u = t - i as f64;
        let c = &self.coef[i];
        let v = c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
        let d = c[1] + u * (2.0 * c[2] + u * (3.0 * c[3] + u * (4.0 * c[4] + u * 5.0 * c[5])));
        let dd = 2.0 * c[2] + u * (6.0 * c[3] + u * (12.0 * c[4] + u * 20.0 * c[5]));
        (v, d / self.h, dd / (self.h * self.h))
    }

    /// Exact integral of the interpolant over the whole table.
    pub fn integral(&self) -> f64 {
        self.coef.iter().map(|c| c[0] + c[1] / 2.0 + c[2] / 3.0 + c[3] / 4.0 + c[4] / 5.0 + c[5] / 6.0).sum::<f64>()
            * self.h
    }

    /// A copy with abscissae scaled by `cx` and values by `cy`.
    pub fn scaled(&self, cx: f64, cy: f64) -> Self {
        QuinticTable { x0: self.x0 * cx, h: self.h * cx, coef: self.coef.iter().map(|c| c.map(|v| v * cy)).collect() }
    }
}
