use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown initial state `{name}`; valid names are: {valid}")]
    UnknownState { name: String, valid: String },

    #[error("invalid value for `{name}` ({value}): {constraint}")]
    InvalidParameter {
        name: String,
        value: String,
        constraint: String,
    },

    #[error("amplitudes are not normalized: sum |c|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid density matrix: {reason}")]
    InvalidDensity { reason: String },

    #[error("{what} = {value} lies outside [0, 1]")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("non-finite state encountered at t = {t}; integration aborted")]
    NonFinite { t: f64 },

    #[error("numerically degenerate spectrum of rho*rho_tilde: {spectrum:?}")]
    DegenerateSpectrum { spectrum: Vec<Complex64> },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    EigenNoConvergence { iterations: usize },

    #[error("unregistered observable `{0}`")]
    UnknownObservable(String),

    #[error("ensemble trajectory {index} (seed {seed}) failed: {source}")]
    Ensemble {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(
        name: impl Into<String>,
        value: impl std::fmt::Display,
        constraint: impl Into<String>,
    ) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            value: value.to_string(),
            constraint: constraint.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite { .. }
            | Error::DegenerateSpectrum { .. }
            | Error::EigenNoConvergence { .. } => true,
            Error::Ensemble { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
