//! Generating curves (r(s), z(s)) of spheres of revolution, arc-length parametrized on [0, M/2].

mod darboux;
mod families;
mod samples;
mod tabulate;

pub use darboux::{CapShape, ZPlus};
pub use families::FamilySpec;

use crate::error::{Error, Result};
use crate::numeric::hermite::QuinticTable;
use crate::numeric::roots::newton_bracketed;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquatorKind {
    Max,
    Min,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquatorInfo {
    pub s_c: f64,
    pub radius: f64,
    pub kind: EquatorKind,
    pub euclidean_length: f64,
}

/// The equator whose radius is the least critical value of r; its Birkhoff annulus is a global section.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MinimalEquator {
    pub s0: f64,
    pub r_min: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ProfilePoint {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
    pub z: f64,
    pub dz: f64,
}

#[derive(Debug, Clone)]
enum Repr {
    Round { radius: f64 },
    Table { r: QuinticTable, z: QuinticTable },
}

#[derive(Debug, Clone)]
pub struct ProfileCurve {
    repr: Repr,
    half: f64,
    family: String,
    params: BTreeMap<String, f64>,
    equators: Vec<EquatorInfo>,
    minimal: MinimalEquator,
    r_max: f64,
    warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub meridian_length: f64,
    pub s0: f64,
    pub r_min: f64,
    pub equator_length: f64,
    pub r_max: f64,
    pub equators: Vec<EquatorInfo>,
    pub warnings: Vec<String>,
}

// Endpoint slope defects below this pass silently; up to ENDPOINT_REJECT they are flagged.
const ENDPOINT_QUIET: f64 = 1e-6;
const ENDPOINT_FLAG: f64 = 1e-4;
const ENDPOINT_REJECT: f64 = 1e-2;

impl ProfileCurve {
    pub fn round(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParam(format!("radius must be positive, got {radius}")));
        }
        let s0 = 0.5 * PI * radius;
        let eq = EquatorInfo { s_c: s0, radius, kind: EquatorKind::Max, euclidean_length: 2.0 * PI * radius };
        Ok(ProfileCurve {
            repr: Repr::Round { radius },
            half: PI * radius,
            family: "round".into(),
            params: BTreeMap::from([("radius".to_string(), radius)]),
            equators: vec![eq],
            minimal: MinimalEquator { s0, r_min: radius, length: 2.0 * PI * radius },
            r_max: radius,
            warnings: vec![],
        })
    }

    /// Assemble from tabulated r and z on [0, M/2] and validate.
    fn from_tables(
        r: QuinticTable,
        z: QuinticTable,
        family: &str,
        params: BTreeMap<String, f64>,
        mut warnings: Vec<String>,
    ) -> Result<Self> {
        let half = r.end();
        let scale = half;
        let (r0, dr0, _) = r.eval3(0.0);
        let (r1, dr1, _) = r.eval3(half);
        let defect = (r0.abs() / scale).max(r1.abs() / scale).max((dr0 - 1.0).abs()).max((dr1 + 1.0).abs());
        if defect > ENDPOINT_REJECT {
            return Err(Error::Degenerate(format!(
                "curve does not meet the axis orthogonally (endpoint defect {defect:.2e})"
            )));
        }
        if defect > ENDPOINT_QUIET {
            let level = if defect > ENDPOINT_FLAG { "only to" } else { "to" };
            warnings.push(format!("endpoint conditions hold {level} {defect:.1e}"));
        }
        let n = r.segments();
        let h = r.step();
        for i in 1..n {
            let s = i as f64 * h;
            if r.eval3(s).0 <= 0.0 {
                return Err(Error::NegativeRadius(s));
            }
        }
        let mut p = ProfileCurve {
            repr: Repr::Table { r, z },
            half,
            family: family.into(),
            params,
            equators: vec![],
            minimal: MinimalEquator { s0: 0.0, r_min: 0.0, length: 0.0 },
            r_max: 0.0,
            warnings,
        };
        p.check_embedded()?;
        p.equators = p.find_equators()?;
        p.minimal = select_minimal(&p.equators)?;
        p.r_max = p.scan_r_max();
        Ok(p)
    }

    /// Total length M of the closed generating curve.
    pub fn meridian_length(&self) -> f64 {
        2.0 * self.half
    }

    pub fn half_length(&self) -> f64 {
        self.half
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn equators(&self) -> &[EquatorInfo] {
        &self.equators
    }

    pub fn minimal_equator(&self) -> MinimalEquator {
        self.minimal
    }

    pub fn r_min(&self) -> f64 {
        self.minimal.r_min
    }

    pub fn s0(&self) -> f64 {
        self.minimal.s0
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Evaluate on all of ℝ: r extends oddly through both poles, as the chart requires.
    pub fn point(&self, s: f64) -> ProfilePoint {
        match &self.repr {
            Repr::Round { radius } => {
                let (sn, cs) = (s / radius).sin_cos();
                ProfilePoint { r: radius * sn, dr: cs, ddr: -sn / radius, z: -radius * cs, dz: sn }
            }
            Repr::Table { r, z } => {
                let (sign, u) = if s < 0.0 {
                    (-1.0, -s)
                } else if s > self.half {
                    (-1.0, 2.0 * self.half - s)
                } else {
                    (1.0, s)
                };
                let (rv, dr, ddr) = r.eval3(u);
                let (zv, dz, _) = z.eval3(u);
                ProfilePoint { r: sign * rv, dr, ddr: sign * ddr, z: zv, dz: sign * dz }
            }
        }
    }

    pub fn r(&self, s: f64) -> f64 {
        self.point(s).r
    }

    pub fn dr(&self, s: f64) -> f64 {
        self.point(s).dr
    }

    pub fn ddr(&self, s: f64) -> f64 {
        self.point(s).ddr
    }

    pub fn z(&self, s: f64) -> f64 {
        self.point(s).z
    }

    /// The same surface scaled by c > 0 (r, z and s all multiply by c).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParam(format!("scale must be positive, got {c}")));
        }
        let repr = match &self.repr {
            Repr::Round { radius } => Repr::Round { radius: radius * c },
            Repr::Table { r, z } => Repr::Table { r: r.scaled(c, c), z: z.scaled(c, c) },
        };
        let mut params = self.params.clone();
        params.insert("scale".into(), c * self.params.get("scale").copied().unwrap_or(1.0));
        Ok(ProfileCurve {
            repr,
            half: self.half * c,
            family: self.family.clone(),
            params,
            equators: self
                .equators
                .iter()
                .map(|e| EquatorInfo {
                    s_c: e.s_c * c,
                    radius: e.radius * c,
                    kind: e.kind,
                    euclidean_length: e.euclidean_length * c,
                })
                .collect(),
            minimal: MinimalEquator {
                s0: self.minimal.s0 * c,
                r_min: self.minimal.r_min * c,
                length: self.minimal.length * c,
            },
            r_max: self.r_max * c,
            warnings: self.warnings.clone(),
        })
    }

    /// `n` uniformly spaced samples (s, r, z) from pole to pole.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64, f64)> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let s = if i == n - 1 { self.half } else { self.half * i as f64 / (n - 1) as f64 };
                let p = self.point(s);
                (s, p.r, p.z)
            })
            .collect()
    }

    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            family: self.family.clone(),
            params: self.params.clone(),
            meridian_length: self.meridian_length(),
            s0: self.minimal.s0,
            r_min: self.minimal.r_min,
            equator_length: self.minimal.length,
            r_max: self.r_max,
            equators: self.equators.clone(),
            warnings: self.warnings.clone(),
        }
    }

    /// Largest |r′² + z′² − 1| on an n-point grid.
    pub fn arc_length_defect(&self, n: usize) -> f64 {
        (0..=n)
            .map(|i| {
                let p = self.point(self.half * i as f64 / n as f64);
                (p.dr * p.dr + p.dz * p.dz - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn grid(&self) -> (usize, f64) {
        match &self.repr {
            Repr::Round { .. } => (4096, self.half / 4096.0),
            Repr::Table { r, .. } => (r.segments(), r.step()),
        }
    }

    fn find_equators(&self) -> Result<Vec<EquatorInfo>> {
        let (n, h) = self.grid();
        let scale = self.half;
        let flat = 1e-9;
        let dr: Vec<f64> = (0..=n).map(|i| self.point(i as f64 * h).dr).collect();
        let mut out = Vec::new();
        let mut i = 1;
        while i < n {
            if dr[i].abs() < flat && dr[i + 1].abs() < flat {
                let start = i;
                while i < n && dr[i + 1].abs() < flat {
                    i += 1;
                }
                let s_c = 0.5 * (start + i) as f64 * h;
                out.push(self.equator_at(s_c, EquatorKind::Degenerate));
                i += 1;
                continue;
            }
            if dr[i] == 0.0 || dr[i].signum() != dr[i + 1].signum() {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let s_c = if dr[i] == 0.0 {
                    a
                } else {
                    newton_bracketed(
                        |s| {
                            let p = self.point(s);
                            (p.dr, p.ddr)
                        },
                        a,
                        b,
                        1e-12 * scale,
                    )?
                };
                let ddr = self.point(s_c).ddr;
                let curv_tol = 1e-8 / scale;
                let kind = if ddr < -curv_tol {
                    EquatorKind::Max
                } else if ddr > curv_tol {
                    EquatorKind::Min
                } else {
                    EquatorKind::Degenerate
                };
                out.push(self.equator_at(s_c, kind));
            }
            i += 1;
        }
        if out.is_empty() {
            return Err(Error::Numerical("no critical point of r found".into()));
        }
        Ok(out)
    }

    fn equator_at(&self, s_c: f64, kind: EquatorKind) -> EquatorInfo {
        let radius = self.r(s_c);
        EquatorInfo { s_c, radius, kind, euclidean_length: 2.0 * PI * radius }
    }

    fn scan_r_max(&self) -> f64 {
        let eq_max = self.equators.iter().map(|e| e.radius).fold(0.0, f64::max);
        let (n, h) = self.grid();
        let grid_max = (0..=n).map(|i| self.r(i as f64 * h)).fold(0.0, f64::max);
        eq_max.max(grid_max)
    }

    /// Reject generating curves whose polyline self-intersects.
    fn check_embedded(&self) -> Result<()> {
        let pts: Vec<(f64, f64)> = self.samples(1500).iter().map(|&(_, r, z)| (r, z)).collect();
        if let Some((i, j)) = first_crossing(&pts) {
            return Err(Error::NotEmbedded(format!(
                "segments near s = {:.4} and s = {:.4} intersect",
                self.half * i as f64 / 1499.0,
                self.half * j as f64 / 1499.0
            )));
        }
        Ok(())
    }
}

fn select_minimal(eqs: &[EquatorInfo]) -> Result<MinimalEquator> {
    let mut best: Option<&EquatorInfo> = None;
    for e in eqs {
        if e.radius <= 0.0 {
            continue;
        }
        best = match best {
            Some(b) if e.radius >= b.radius * (1.0 - 1e-12) => Some(b),
            _ => Some(e),
        };
    }
    let e = best.ok_or_else(|| Error::Numerical("no positive critical value of r".into()))?;
    Ok(MinimalEquator { s0: e.s_c, r_min: e.radius, length: 2.0 * PI * e.radius })
}

fn first_crossing(p: &[(f64, f64)]) -> Option<(usize, usize)> {
    let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let n = p.len();
    for i in 0..n - 1 {
        let (a, b) = (p[i], p[i + 1]);
        let (xlo, xhi) = (a.0.min(b.0), a.0.max(b.0));
        let (ylo, yhi) = (a.1.min(b.1), a.1.max(b.1));
        for j in i + 2..n - 1 {
            let (c, d) = (p[j], p[j + 1]);
            if c.0.max(d.0) < xlo || c.0.min(d.0) > xhi || c.1.max(d.1) < ylo || c.1.min(d.1) > yhi {
                continue;
            }
            let d1 = orient(a, b, c);
            let d2 = orient(a, b, d);
            let d3 = orient(c, d, a);
            let d4 = orient(c, d, b);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests;
