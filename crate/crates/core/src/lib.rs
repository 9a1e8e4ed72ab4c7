// `!(x > 0.0)` is deliberate throughout: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and Runge–Kutta tableaux are kept digit for digit as published.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod config;
pub mod error;
pub mod finsler;
pub mod geodesic;
pub mod measures;
pub mod numeric;
pub mod profile;
pub mod return_map;
pub mod systole;

pub use error::{Error, Result};
pub use geodesic::{GeodesicClass, NavigationParams, Trajectory, UnitTangentState};
pub use profile::{CapShape, EquatorInfo, EquatorKind, FamilySpec, ProfileCurve};
pub use return_map::{GeneratingTable, GridSpec};
pub use systole::{AnalysisOptions, AnalysisReport};
