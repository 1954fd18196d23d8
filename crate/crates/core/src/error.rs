use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The parameters fall in a different regime than the operation requires.
    #[error("regime mismatch: {message} (hint: {hint})")]
    RegimeMismatch { message: String, hint: String },

    /// An enumeration would exceed its configured site budget.
    #[error("resource limit: {needed} sites requested, budget is {budget}")]
    Resource { needed: u128, budget: u128 },

    /// A path was not simulated far enough for the requested evaluation.
    #[error("insufficient horizon: need {needed}, path covers {available}")]
    InsufficientHorizon { needed: f64, available: f64 },

    /// Monte Carlo sampling was refused because the event is stretched-exponentially rare.
    #[error("refused: {0}")]
    Refused(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}
