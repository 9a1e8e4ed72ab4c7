//! JSON run configuration.

use crate::error::{Error, Result};
use crate::geodesic::NavigationParams;
use crate::profile::{CapShape, FamilySpec, ProfileCurve};
use crate::return_map::GridSpec;
use crate::systole::AnalysisOptions;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Either a named family or a CSV of samples with header `s,r,z`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub family: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    #[serde(default)]
    pub theta: f64,
    pub beta: f64,
    pub s: f64,
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZollBuildConfig {
    #[serde(default = "default_cap")]
    pub cap: CapShape,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_profile_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: Option<ProfileConfig>,
    #[serde(default = "default_winds")]
    pub a: Vec<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_zoll_tol")]
    pub zoll_tol_rel: f64,
    pub geodesic: Option<GeodesicConfig>,
    pub zoll_build: Option<ZollBuildConfig>,
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    /// Directory of the config file; relative sample paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_samples() -> usize {
    1000
}
fn default_profile_samples() -> usize {
    2001
}
fn default_tol() -> f64 {
    1e-10
}
fn default_cap() -> CapShape {
    CapShape::Round
}
fn one() -> f64 {
    1.0
}
fn default_winds() -> Vec<f64> {
    vec![0.0]
}
fn default_zoll_tol() -> f64 {
    1e-4
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl RunConfig {
    pub fn from_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_str(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate(&self) -> Result<()> {
        if self.grid.nodes < 21 {
            return Err(Error::Config(format!("grid.nodes must be at least 21, got {}", self.grid.nodes)));
        }
        if self.a.is_empty() {
            return Err(Error::Config("`a` must list at least one wind value".into()));
        }
        if let Some(a) = self.a.iter().find(|a| !a.is_finite()) {
            return Err(Error::Config(format!("wind values must be finite, got {a}")));
        }
        if !(self.zoll_tol_rel > 0.0) {
            return Err(Error::Config("zoll_tol_rel must be positive".into()));
        }
        Ok(())
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions { grid: self.grid, zoll_tol_rel: self.zoll_tol_rel }
    }

    pub fn build_profile(&self) -> Result<ProfileCurve> {
        let p = self.profile.as_ref().ok_or_else(|| Error::Config("this command needs a `profile` section".into()))?;
        match (&p.family, &p.samples) {
            (Some(family), None) => {
                ProfileCurve::from_family(&FamilySpec { family: family.clone(), params: p.params.clone() })
            }
            (None, Some(path)) => {
                if !p.params.is_empty() {
                    return Err(Error::Config("`params` applies to families, not to samples".into()));
                }
                let path = if path.is_absolute() { path.clone() } else { self.base_dir.join(path) };
                ProfileCurve::from_csv(&path).map_err(|e| match e {
                    Error::Io(io) => Error::Config(format!("cannot read {}: {io}", path.display())),
                    other => other,
                })
            }
            _ => Err(Error::Config("profile needs exactly one of `family` or `samples`".into())),
        }
    }

    /// Wind values checked against the profile.
    pub fn winds(&self, profile: &ProfileCurve) -> Result<Vec<NavigationParams>> {
        self.a
            .iter()
            .map(|&a| {
                let nav = NavigationParams::new(a);
                nav.validate(profile).map(|_| nav)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::from_str(r#"{"profile": {"family": "round"}}"#, Path::new(".")).unwrap();
        assert_eq!(c.a, vec![0.0]);
        assert_eq!(c.grid.nodes, 201);
        assert!(c.wants(Format::Csv) && c.wants(Format::Json));
        assert!((c.build_profile().unwrap().r_min() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"profile": {"family": "round"}, "grid": {"nodes": 11}}"#,
            r#"{"profile": {"family": "round"}, "a": []}"#,
            r#"{"profile": {"family": "round"}, "typo": 1}"#,
            r#"{"profile": {"family": "round"}, "grid": {"nodez": 51}}"#,
        ] {
            let e = RunConfig::from_str(text, Path::new(".")).unwrap_err();
            assert!(e.is_input_error(), "{text}");
        }
        let c = RunConfig::from_str(r#"{"profile": {"family": "round", "samples": "x.csv"}}"#, Path::new(".")).unwrap();
        assert!(c.build_profile().unwrap_err().is_input_error());
        let c = RunConfig::from_str(r#"{"profile": {"family": "round"}, "a": [1.5]}"#, Path::new(".")).unwrap();
        assert!(c.winds(&c.build_profile().unwrap()).unwrap_err().is_input_error());
    }
}
