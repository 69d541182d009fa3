use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants split into input problems (the caller asked for something
/// invalid) and numerical failures (the request was valid but a solver,
/// quadrature or integrator could not deliver). [`Error::is_numerical`]
/// draws that line for the CLI exit-code taxonomy.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("model validity: {0}")]
    ModelValidity(String),

    #[error("quadrature did not converge: estimated error {achieved:.3e} exceeds requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("step size {dt:.3e} violates the stability bound; use dt <= {suggested:.3e}")]
    StepSize { dt: f64, suggested: f64 },

    #[error("integration diverged at step {step}")]
    Divergence { step: usize },

    #[error("scheme failure: {0}")]
    Scheme(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Divergence { .. }
                | Error::Scheme(_)
                | Error::Singular(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
