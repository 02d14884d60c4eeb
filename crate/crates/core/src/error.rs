use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration document or parameter set violates a model invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config document: {0}")]
    Document(#[from] serde_json::Error),

    /// Special-function arguments outside the integral representation's validity region.
    #[error("outside validity region: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {what} (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("integrand returned a non-finite value at {0:e}")]
    NonFinite(f64),

    #[error("root not bracketed for side lobe {0}")]
    RootNotBracketed(usize),

    /// Moment matching received a zero (or negative) variance.
    #[error("degenerate variance: m1 = {m1}, m2 = {m2}")]
    DegenerateVariance { m1: f64, m2: f64 },

    #[error("moment out of range: {0}")]
    MomentRange(String),

    #[error("realization file: {0}")]
    Realization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFinite(_)
                | Error::RootNotBracketed(_)
                | Error::DegenerateVariance { .. }
                | Error::MomentRange(_)
        )
    }
}
