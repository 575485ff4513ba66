use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge for {what}: achieved error {achieved:.3e}, requested {requested:.3e}")]
    NonConvergence {
        what: String,
        achieved: f64,
        requested: f64,
    },
    #[error("divergent moment: {0}")]
    DivergentMoment(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0} has an atomic Lévy measure and no Lévy density")]
    AtomicMeasure(String),
    #[error("no closed convolution-power map for {0}")]
    UnsupportedPower(String),
    #[error("denominator vanishes: {0}")]
    ZeroDenominator(String),
    #[error("tail kernel of order {k} changes sign on the negative half-line and is not a density")]
    SignedKernel { k: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    /// True for numeric failures the CLI maps to exit code 3.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::DivergentMoment(_))
    }
}
