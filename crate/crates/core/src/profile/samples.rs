//! Profiles from sampled (s, r, z) data.

use super::families::DEFAULT_KNOTS;
use super::tabulate::{tabulate_param, ParamCurve};
use super::ProfileCurve;
use crate::error::{Error, Result};
use crate::numeric::spline::CubicSpline;
use std::collections::BTreeMap;
use std::path::Path;

struct SplineCurve {
    r: CubicSpline,
    z: CubicSpline,
}

impl ParamCurve for SplineCurve {
    fn domain(&self) -> (f64, f64) {
        let k = self.r.knots();
        (k[0], k[k.len() - 1])
    }

    fn breaks(&self) -> Vec<f64> {
        self.r.knots().to_vec()
    }

    fn eval(&self, t: f64) -> [f64; 6] {
        let (r, rt, rtt) = self.r.eval3(t);
        let (z, zt, ztt) = self.z.eval3(t);
        [r, z, rt, zt, rtt, ztt]
    }
}

#[derive(serde::Deserialize)]
struct Row {
    s: f64,
    r: f64,
    z: f64,
}

impl ProfileCurve {
    /// Interpolate samples by C² cubic splines in the sample parameter, then reparametrize by arc length.
    /// The parameter need not be exact arc length but must increase strictly from pole to pole.
    pub fn from_samples(points: &[(f64, f64, f64)]) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::InvalidParam("need at least 8 samples".into()));
        }
        let last = points.len() - 1;
        let scale = (points[last].0 - points[0].0).abs();
        for &(s, r, _) in &points[1..last] {
            if r <= 0.0 {
                return Err(Error::NegativeRadius(s));
            }
        }
        if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite() && p.2.is_finite())) {
            return Err(Error::InvalidParam("non-finite sample".into()));
        }
        let s: Vec<f64> = points.iter().map(|p| p.0).collect();
        let mut r: Vec<f64> = points.iter().map(|p| p.1).collect();
        let z: Vec<f64> = points.iter().map(|p| p.2).collect();
        let mut warnings = vec![];
        let pole_defect = (r[0].abs()).max(r[last].abs()) / scale;
        if pole_defect > 1e-2 {
            return Err(Error::Degenerate(format!(
                "profile does not reach the axis (|r| = {:.3e} at an end)",
                r[0].abs().max(r[last].abs())
            )));
        }
        if pole_defect > 0.0 {
            warnings.push(format!("end radii {:.1e} snapped to the axis", pole_defect * scale));
            r[0] = 0.0;
            r[last] = 0.0;
        }
        let curve = SplineCurve { r: CubicSpline::new(&s, &r)?, z: CubicSpline::new(&s, &z)? };
        let (rt, zt) = tabulate_param(&curve, DEFAULT_KNOTS)?;
        let params = BTreeMap::from([("samples".to_string(), points.len() as f64)]);
        ProfileCurve::from_tables(rt, zt, "samples", params, warnings)
    }

    /// Read a CSV with header `s,r,z`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["s", "r", "z"] {
            return Err(Error::InvalidParam(format!(
                "profile CSV header must be `s,r,z`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut pts = vec![];
        for row in rdr.deserialize() {
            let row: Row = row?;
            pts.push((row.s, row.r, row.z));
        }
        ProfileCurve::from_samples(&pts)
    }

    /// Write `n` samples as CSV `s,r,z`.
    pub fn write_csv(&self, path: &Path, n: usize) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["s", "r", "z"])?;
        for (s, r, z) in self.samples(n) {
            w.write_record([s.to_string(), r.to_string(), z.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
