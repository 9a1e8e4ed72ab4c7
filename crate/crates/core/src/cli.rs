//! Subcommand implementations; argument parsing and exit codes live in the binary.

use crate::config::{Format, RunConfig};
use crate::error::{Error, Result};
use crate::geodesic::{classify, integrate, UnitTangentState};
use crate::profile::ProfileCurve;
use crate::return_map::build_generating_table;
use crate::systole::{analyze_with_table, zoll_check, ZollVerdict};
use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Geodesic,
    Gentable,
    ZollBuild,
    Sweep,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Run `cmd` and return the files written. `out` overrides the configured output directory.
pub fn run(cmd: Command, cfg: &RunConfig, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.out_dir.as_ref().map(|d| if d.is_absolute() { d.clone() } else { cfg.base_dir.join(d) }))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    match cmd {
        Command::Analyze => analyze(cfg, &dir),
        Command::Geodesic => geodesic(cfg, &dir),
        Command::Gentable => gentable(cfg, &dir),
        Command::ZollBuild => zoll_build(cfg, &dir),
        Command::Sweep => sweep(cfg, &dir),
    }
}

fn first_wind(cfg: &RunConfig, profile: &ProfileCurve) -> Result<crate::geodesic::NavigationParams> {
    let winds = cfg.winds(profile)?;
    if winds.len() > 1 {
        eprintln!("note: using a = {} (first entry); `sweep` covers the whole list", winds[0].a);
    }
    Ok(winds[0])
}

fn analyze(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let profile = cfg.build_profile()?;
    let nav = first_wind(cfg, &profile)?;
    let table = build_generating_table(&profile, &cfg.grid)?;
    let analysis = analyze_with_table(&profile, &nav, table, &cfg.analysis_options())?;
    let mut written = vec![];
    if cfg.wants(Format::Json) {
        let p = dir.join("report.json");
        write_json(&p, &analysis.report)?;
        written.push(p);
    }
    if cfg.wants(Format::Csv) {
        let g = dir.join("gentable.csv");
        analysis.table.write_csv(&g)?;
        let f = dir.join("finsler.csv");
        analysis.finsler.write_csv(&f)?;
        written.extend([g, f]);
    }
    Ok(written)
}

fn gentable(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let profile = cfg.build_profile()?;
    let nav = first_wind(cfg, &profile)?;
    let table = build_generating_table(&profile, &cfg.grid)?;
    let ft = crate::finsler::build_finsler_table(&table, nav.a)?;
    let g = dir.join("gentable.csv");
    table.write_csv(&g)?;
    let f = dir.join("finsler.csv");
    ft.write_csv(&f)?;
    Ok(vec![g, f])
}

fn geodesic(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let g = cfg
        .geodesic
        .as_ref()
        .ok_or_else(|| Error::Config("`geodesic` needs a `geodesic` section with beta, s and t_end".into()))?;
    if !(g.t_end > 0.0) || g.samples == 0 {
        return Err(Error::Config("geodesic.t_end must be positive and samples nonzero".into()));
    }
    let profile = cfg.build_profile()?;
    let nav = first_wind(cfg, &profile)?;
    if !(g.s > 0.0 && g.s < profile.half_length()) {
        return Err(Error::Config(format!(
            "geodesic.s must lie strictly between the poles (0, {})",
            profile.half_length()
        )));
    }
    let start = UnitTangentState::new(g.theta, g.beta, g.s);
    let traj = integrate(&start, &profile, &nav, g.t_end, g.tol)?;
    let path = dir.join("trajectory.csv");
    traj.write_csv(&profile, &path, g.samples)?;
    let class = classify(&start, &profile, &nav, None, g.tol)?;
    eprintln!(
        "{} steps, max Clairaut drift {:.3e}, class {}",
        traj.step_count(),
        traj.max_clairaut_drift(),
        serde_json::to_string(&class)?
    );
    Ok(vec![path])
}

#[derive(Serialize)]
struct Certificate<'a> {
    certificate: &'static str,
    zoll: crate::systole::ZollReport,
    profile: crate::profile::ProfileSummary,
    cap: &'a crate::profile::CapShape,
    arc_length_defect: f64,
}

fn zoll_build(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let z = cfg.zoll_build.as_ref().ok_or_else(|| Error::Config("`zoll-build` needs a `zoll_build` section".into()))?;
    if z.samples < 8 {
        return Err(Error::Config("zoll_build.samples must be at least 8".into()));
    }
    let profile = ProfileCurve::darboux_zoll(&z.cap, z.radius)?;
    let table = build_generating_table(&profile, &cfg.grid)?;
    let zoll = zoll_check(&profile, &table, cfg.zoll_tol_rel * table.l);
    let csv = dir.join("profile.csv");
    profile.write_csv(&csv, z.samples)?;
    let cert = Certificate {
        certificate: match zoll.verdict {
            ZollVerdict::Zoll => "zoll",
            ZollVerdict::NotZoll => "not_zoll",
            ZollVerdict::Inconclusive => "inconclusive",
        },
        zoll,
        profile: profile.summary(),
        cap: &z.cap,
        arc_length_defect: profile.arc_length_defect(1000),
    };
    let json = dir.join("certificate.json");
    write_json(&json, &cert)?;
    Ok(vec![csv, json])
}

fn sweep(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let profile = cfg.build_profile()?;
    let winds = cfg.winds(&profile)?;
    let table = build_generating_table(&profile, &cfg.grid)?;
    let opts = cfg.analysis_options();
    let rows: Result<Vec<(f64, f64, f64, f64)>> = winds
        .par_iter()
        .map(|nav| {
            let r = analyze_with_table(&profile, nav, table.clone(), &opts)?.report;
            Ok((nav.a, r.rho_bh, r.rho_ht, r.ell_min_upper_bound))
        })
        .collect();
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["a", "rho_bh", "rho_ht", "ell_upper"])?;
    for (a, bh, ht, ell) in rows? {
        w.write_record([a, bh, ht, ell].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(vec![path])
}
