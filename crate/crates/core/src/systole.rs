//! Closed geodesics, systolic ratios, Zoll certification and the inequality ledger.

use crate::error::Result;
use crate::finsler::{build_finsler_table, fixed_points, prop1_search, FinslerTable, Prop1Outcome};
use crate::geodesic::NavigationParams;
use crate::measures::{contact_volume_lower_bound, volume_report, VolumeReport};
use crate::numeric::quad::{integrate, QuadTol};
use crate::profile::{EquatorKind, ProfileCurve, ProfileSummary};
use crate::return_map::{build_generating_table, GeneratingTable, GridSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicSource {
    EquatorWithWind,
    EquatorAgainstWind,
    Meridian,
    AnnulusFixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedGeodesicRecord {
    pub source: GeodesicSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_c: Option<f64>,
    pub length: f64,
    pub a: f64,
    /// Representative of a one-parameter family of fixed points (F_a′ constant).
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub continuum: bool,
}

/// G_a-length of the equator at radius r traversed with (+) or against (−) the wind.
pub fn equator_length(r: f64, a: f64, with_wind: bool) -> f64 {
    if with_wind {
        TAU * r / (1.0 + a * r)
    } else {
        TAU * r / (1.0 - a * r)
    }
}

/// Equators both ways, meridians when a = 0, and the annulus fixed points of the windy return map.
pub fn closed_geodesics(
    profile: &ProfileCurve,
    nav: &NavigationParams,
    ft: &FinslerTable,
) -> Result<Vec<ClosedGeodesicRecord>> {
    nav.validate(profile)?;
    let a = nav.a;
    let mut out = vec![];
    for e in profile.equators() {
        for (with, source) in [(true, GeodesicSource::EquatorWithWind), (false, GeodesicSource::EquatorAgainstWind)] {
            out.push(ClosedGeodesicRecord {
                source,
                eta: None,
                s_c: Some(e.s_c),
                length: equator_length(e.radius, a, with),
                a,
                continuum: false,
            });
        }
    }
    if a == 0.0 {
        out.push(ClosedGeodesicRecord {
            source: GeodesicSource::Meridian,
            eta: Some(0.0),
            s_c: None,
            length: profile.meridian_length(),
            a,
            continuum: false,
        });
    }
    let fp = fixed_points(profile, ft)?;
    for p in fp.points.iter().filter(|p| !(a == 0.0 && p.eta == 0.0)) {
        out.push(ClosedGeodesicRecord {
            source: GeodesicSource::AnnulusFixedPoint,
            eta: Some(p.eta),
            s_c: None,
            length: p.length,
            a,
            continuum: false,
        });
    }
    if let Some(c) = fp.continuum {
        out.push(ClosedGeodesicRecord {
            source: GeodesicSource::AnnulusFixedPoint,
            eta: None,
            s_c: None,
            length: c.min_length,
            a,
            continuum: true,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZollVerdict {
    Zoll,
    NotZoll,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureCheck {
    pub r_dd_at_s0: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZollReport {
    pub verdict: ZollVerdict,
    pub max_abs_f_minus_l: f64,
    pub tol: f64,
    /// Worst disagreement of the two F routes.
    pub noise_floor: f64,
    pub single_equator: bool,
    pub nondegenerate_max: bool,
    /// Only evaluated when the verdict is Zoll.
    pub curvature: Option<CurvatureCheck>,
}

/// Zoll iff max|F − L| < tol; a deviation within ten times the F noise floor is inconclusive.
pub fn zoll_check(profile: &ProfileCurve, table: &GeneratingTable, tol: f64) -> ZollReport {
    let dev = table.max_deviation_from_l();
    let noise = table.worst_crosscheck().1;
    let verdict = if dev < tol {
        ZollVerdict::Zoll
    } else if dev <= 10.0 * noise {
        ZollVerdict::Inconclusive
    } else {
        ZollVerdict::NotZoll
    };
    let eqs = profile.equators();
    let curvature = (verdict == ZollVerdict::Zoll).then(|| {
        let s0 = profile.s0();
        let r_dd = profile.ddr(s0);
        let expected = -1.0 / profile.r(s0);
        let rel_error = ((r_dd - expected) / expected).abs();
        CurvatureCheck { r_dd_at_s0: r_dd, expected, rel_error, ok: rel_error < 1e-3 }
    });
    ZollReport {
        verdict,
        max_abs_f_minus_l: dev,
        tol,
        noise_floor: noise,
        single_equator: eqs.len() == 1,
        nondegenerate_max: eqs.len() == 1 && eqs[0].kind == EquatorKind::Max,
        curvature,
    }
}

/// Relative slack granted to non-strict relations and identities; (i) is an identity whenever Γ is empty.
pub const LEDGER_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub name: &'static str,
    pub lhs: f64,
    pub relation: &'static str,
    pub rhs: f64,
    pub holds: bool,
}

impl LedgerEntry {
    fn new(name: &'static str, lhs: f64, relation: &'static str, rhs: f64) -> Self {
        let slack = LEDGER_SLACK * lhs.abs().max(rhs.abs()).max(1.0);
        let holds = match relation {
            ">" => lhs > rhs,
            ">=" => lhs >= rhs - slack,
            "<" => lhs < rhs,
            "<=" => lhs <= rhs + slack,
            _ => (lhs - rhs).abs() <= slack,
        };
        LedgerEntry { name, lhs, relation, rhs, holds }
    }
}

/// Which argument certifies ρ_BH ≤ π for this surface and wind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// a = 0 and F constant: ratio exactly π.
    Zoll,
    /// a = 0, F not constant: its minimum μ is a closed geodesic with 2μ² < vol.
    MinimumOfF,
    /// a ≠ 0 and the equator of minimal radius alone gives ℓ₀² < vol/2.
    ShortEquator,
    /// a ≠ 0, ℓ₀² ≥ vol/2: the search below the minimizer of F supplies a shorter geodesic.
    CriticalPointOfFa,
    /// Zoll verdict inconclusive, or the chain above failed numerically.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratingDigest {
    pub nodes: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub f_end: f64,
    pub integral_0_1: f64,
    pub min_f: f64,
    pub worst_crosscheck_eta: f64,
    pub worst_crosscheck: f64,
    pub genfun_defect: f64,
    /// min over nodes of F(η) − L|η|.
    pub min_margin_over_l_eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinslerDigest {
    pub a: f64,
    pub fa_minus_one: f64,
    pub fa_one: f64,
    pub max_t_route_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableDigests {
    pub generating: GeneratingDigest,
    pub finsler: FinslerDigest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ledger {
    pub branch: Branch,
    pub entries: Vec<LedgerEntry>,
    pub minimizer: ClosedGeodesicRecord,
    pub equator_only_ell: f64,
    pub equator_only_rho_bh: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prop1: Option<Prop1Outcome>,
    pub tables: TableDigests,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub profile: ProfileSummary,
    pub volumes: VolumeReport,
    pub geodesics: Vec<ClosedGeodesicRecord>,
    /// Minimum over the enumerated closed geodesics; an upper bound for the true minimum.
    pub ell_min_upper_bound: f64,
    pub rho_bh: f64,
    pub rho_ht: f64,
    pub zoll: ZollReport,
    pub ledger: Ledger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub grid: GridSpec,
    /// Zoll tolerance as a fraction of L.
    pub zoll_tol_rel: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { grid: GridSpec::default(), zoll_tol_rel: 1e-4 }
    }
}

/// Report plus the tables it was computed from.
pub struct Analysis {
    pub report: AnalysisReport,
    pub table: GeneratingTable,
    pub finsler: FinslerTable,
}

fn digest(table: &GeneratingTable, ft: &FinslerTable) -> TableDigests {
    let (eta, worst) = table.worst_crosscheck();
    let (lo, hi) = ft.endpoints();
    TableDigests {
        generating: GeneratingDigest {
            nodes: table.rows.len(),
            l: table.l,
            m: table.m,
            f_end: table.f_end(),
            integral_0_1: table.integral_0_1(),
            min_f: table.rows.iter().map(|r| r.big_f).fold(f64::INFINITY, f64::min),
            worst_crosscheck_eta: eta,
            worst_crosscheck: worst,
            genfun_defect: table.genfun_defect(),
            min_margin_over_l_eta: table
                .rows
                .iter()
                .map(|r| r.big_f - table.l * r.eta.abs())
                .fold(f64::INFINITY, f64::min),
        },
        finsler: FinslerDigest { a: ft.a, fa_minus_one: lo, fa_one: hi, max_t_route_gap: ft.max_t_route_gap() },
    }
}

/// ∫₀¹ max{μ, Lη} dη by quadrature, split at the kink.
fn integral_of_max(mu: f64, l: f64) -> Result<f64> {
    let tol = QuadTol::default();
    let kink = (mu / l).clamp(0.0, 1.0);
    Ok(integrate(&|_| mu, 0.0, kink, tol)? + integrate(&|e: f64| (l * e).max(mu), kink, 1.0, tol)?)
}

/// Build every table for `profile` and assemble the report at wind `nav`.
pub fn analyze(profile: &ProfileCurve, nav: &NavigationParams, opts: &AnalysisOptions) -> Result<Analysis> {
    nav.validate(profile)?;
    let table = build_generating_table(profile, &opts.grid)?;
    analyze_with_table(profile, nav, table, opts)
}

/// As [`analyze`] with a generating table already built for this profile; it does not depend on a.
pub fn analyze_with_table(
    profile: &ProfileCurve,
    nav: &NavigationParams,
    table: GeneratingTable,
    opts: &AnalysisOptions,
) -> Result<Analysis> {
    nav.validate(profile)?;
    let a = nav.a;
    let ft = build_finsler_table(&table, a)?;
    let volumes = volume_report(profile, nav, Some(&table))?;
    let geodesics = closed_geodesics(profile, nav, &ft)?;
    let minimizer =
        *geodesics.iter().min_by(|p, q| p.length.total_cmp(&q.length)).expect("the minimal equator is always recorded");
    let ell = minimizer.length;
    let eq_ell = geodesics
        .iter()
        .filter(|g| matches!(g.source, GeodesicSource::EquatorWithWind | GeodesicSource::EquatorAgainstWind))
        .map(|g| g.length)
        .fold(f64::INFINITY, f64::min);
    let zoll = zoll_check(profile, &table, opts.zoll_tol_rel * table.l);

    // The Riemannian contact volume 2π·area enters every branch.
    let vol = TAU * volumes.bh_area;
    let l = table.l;
    let int_f = table.integral_0_1();
    let lower = contact_volume_lower_bound(&table);
    let mut entries = vec![LedgerEntry::new("vol >= 4L*int_0^1 F - 2L^2", vol, ">=", lower)];
    let mu = table.rows.iter().map(|r| r.big_f).fold(f64::INFINITY, f64::min);
    let mut prop1 = None;
    let branch = if a == 0.0 {
        match zoll.verdict {
            ZollVerdict::Zoll => Branch::Zoll,
            ZollVerdict::Inconclusive => Branch::Unresolved,
            ZollVerdict::NotZoll => {
                let closed = mu + (l - mu) * (l - mu) / (2.0 * l);
                entries.push(LedgerEntry::new(
                    "int_0^1 max{mu, L eta} = mu + (L-mu)^2/(2L)",
                    integral_of_max(mu, l)?,
                    "=",
                    closed,
                ));
                entries.push(LedgerEntry::new("int_0^1 F > mu + (L-mu)^2/(2L)", int_f, ">", closed));
                entries.push(LedgerEntry::new("vol > 2 mu^2", vol, ">", 2.0 * mu * mu));
                Branch::MinimumOfF
            }
        }
    } else {
        let c = a.abs() * table.r_min;
        let ell0 = l / (1.0 + c);
        let outcome = prop1_search(profile, &ft)?;
        let branch = if ell0 * ell0 < 0.5 * vol {
            entries.push(LedgerEntry::new("ell_0^2 < vol/2", ell0 * ell0, "<", 0.5 * vol));
            Branch::ShortEquator
        } else if let Prop1Outcome::Found { integral, bound, f_bar, ell0, tau_hat, .. } = outcome {
            let closed = f_bar + (l - f_bar) * (l - f_bar) / (2.0 * l);
            entries.push(LedgerEntry::new("2 ell_0^2 >= vol", 2.0 * ell0 * ell0, ">=", vol));
            entries.push(LedgerEntry::new("int_0^1 F <= (L/2)(1 + 1/(1+a r_min)^2)", integral, "<=", bound));
            entries.push(LedgerEntry::new("mu < ell_0", f_bar, "<", ell0));
            entries.push(LedgerEntry::new("tau(eta_hat) < mu", tau_hat, "<", f_bar));
            entries.push(LedgerEntry::new(
                "int_0^1 max{mu, L eta} = mu + (L-mu)^2/(2L)",
                integral_of_max(f_bar, l)?,
                "=",
                closed,
            ));
            entries.push(LedgerEntry::new("int_0^1 F > mu + (L-mu)^2/(2L)", int_f, ">", closed));
            entries.push(LedgerEntry::new("vol >= 2 mu^2", vol, ">=", 2.0 * f_bar * f_bar));
            entries.push(LedgerEntry::new(
                "2 mu^2 > 2 tau(eta_hat)^2",
                2.0 * f_bar * f_bar,
                ">",
                2.0 * tau_hat * tau_hat,
            ));
            Branch::CriticalPointOfFa
        } else {
            Branch::Unresolved
        };
        prop1 = Some(outcome);
        branch
    };
    let report = AnalysisReport {
        profile: profile.summary(),
        volumes,
        ell_min_upper_bound: ell,
        rho_bh: ell * ell / volumes.bh_area,
        rho_ht: ell * ell / volumes.ht_area,
        zoll,
        ledger: Ledger {
            branch,
            entries,
            minimizer,
            equator_only_ell: eq_ell,
            equator_only_rho_bh: eq_ell * eq_ell / volumes.bh_area,
            prop1,
            tables: digest(&table, &ft),
        },
        geodesics,
    };
    Ok(Analysis { report, table, finsler: ft })
}

pub fn systolic_report(
    profile: &ProfileCurve,
    nav: &NavigationParams,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    Ok(analyze(profile, nav, opts)?.report)
}
