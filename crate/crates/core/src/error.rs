use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown profile family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("negative radius at s = {0}")]
    NegativeRadius(f64),

    #[error("profile curve is not embedded: {0}")]
    NotEmbedded(String),

    #[error("curve cannot be reparametrized by arc length: {0}")]
    Degenerate(String),

    #[error("Darboux precondition violated at rho = {rho} (margin {margin:.3e})")]
    DarbouxPrecondition { rho: f64, margin: f64 },

    #[error("pole singularity at s = {0}")]
    Pole(f64),

    #[error("wind too strong: |a| r_max = {0} must be < 1")]
    WindTooStrong(f64),

    #[error("zero tangent vector")]
    ZeroVector,

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("no return to the annulus within the horizon (eta = {0})")]
    NoReturn(f64),

    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("{what}: discrepancy {discrepancy:.3e} at eta = {eta} exceeds {tol:.1e}")]
    CrossCheck { what: &'static str, eta: f64, discrepancy: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Filesystem failures inside the CSV layer stay I/O errors; only malformed content is a CSV error.
impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if !e.is_io_error() {
            return Error::Csv(e);
        }
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!("is_io_error implies an I/O kind"),
        }
    }
}

impl Error {
    /// Errors caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownFamily(_)
                | Error::InvalidParam(_)
                | Error::NegativeRadius(_)
                | Error::NotEmbedded(_)
                | Error::Degenerate(_)
                | Error::DarbouxPrecondition { .. }
                | Error::WindTooStrong(_)
                | Error::ZeroVector
                | Error::Config(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}
