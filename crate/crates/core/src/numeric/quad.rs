//! Adaptive Gauss–Kronrod quadrature and square-root endpoint substitution.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights belong to the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel; returns (integral, |Kronrod − Gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Fixed 15-point Kronrod rule, used where the integrand is known smooth on the panel.
pub fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    gk15(f, a, b).0
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol { abs: 1e-12, rel: 1e-12, max_panels: 4000 }
    }
}

impl QuadTol {
    pub fn abs(abs: f64) -> Self {
        QuadTol { abs, ..Default::default() }
    }
}

/// Globally adaptive bisection of the worst panel until the summed error estimate is small.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: QuadTol) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (val, err) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, val, err });
    let mut total = val;
    let mut total_err = err;
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_panels {
            return Err(Error::Quadrature { a, b });
        }
        let p = heap.pop().expect("heap is never empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Panel width at machine resolution: accept it as is.
            total_err -= p.err;
            heap.push(Panel { err: 0.0, ..p });
            if heap.iter().all(|q| q.err == 0.0) {
                break;
            }
            continue;
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.val;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
    }
    // Re-sum to shed the drift of incremental updates.
    Ok(heap.iter().map(|p| p.val).sum())
}

/// Integrate over [a, b] where the integrand may carry a square-root singularity
/// at either end; s = a + u² (resp. s = b − u²) turns it into a smooth integrand.
pub fn integrate_sqrt_ends<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    left: bool,
    right: bool,
    tol: QuadTol,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let half = |lo: f64, hi: f64, sing_lo: bool, sing_hi: bool| -> Result<f64> {
        if sing_lo {
            let w = (hi - lo).sqrt();
            integrate(&|u: f64| 2.0 * u * f(lo + u * u), 0.0, w, tol)
        } else if sing_hi {
            let w = (hi - lo).sqrt();
            integrate(&|u: f64| 2.0 * u * f(hi - u * u), 0.0, w, tol)
        } else {
            integrate(f, lo, hi, tol)
        }
    };
    Ok(half(a, m, left, false)? + half(m, b, false, right)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact_on_one_panel() {
        let (v, _) = gk15(&|x: f64| x.powi(9) - 3.0 * x * x, 0.0, 2.0);
        assert!((v - (1024.0 / 10.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn sin_over_period() {
        let v = integrate(&|x: f64| x.sin().powi(2), 0.0, 2.0 * PI, QuadTol::default()).unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn sqrt_singular_ends() {
        // Quarter circle area.
        let f = |x: f64| (1.0 - x * x).max(0.0).sqrt();
        let v = integrate_sqrt_ends(&f, -1.0, 1.0, true, true, QuadTol::default()).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn kink_converges() {
        let v = integrate(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, QuadTol::default()).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-11);
    }
}
