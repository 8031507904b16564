use thiserror::Error;

/// Errors produced by the model, analysis and integration layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid model parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unknown incidence family `{0}`")]
    UnknownIncidence(String),

    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),

    #[error("argument {value} outside admissible interval [{lower}, {upper}]")]
    OutOfDomain { value: f64, lower: f64, upper: f64 },

    /// R0 <= 1, so only the disease-free equilibrium exists.
    #[error("no endemic equilibrium: R0 = {r0} <= 1")]
    NoEndemicEquilibrium { r0: f64 },

    #[error("bisection bracket has no sign change: H(left) = {left}, H(right) = {right}")]
    NoSignChange { left: f64, right: f64 },

    #[error("step {step} does not divide maximum delay {h}")]
    StepMismatch { step: f64, h: f64 },

    #[error("invalid integration setup: {0}")]
    InvalidIntegration(String),

    #[error("time {t} is not on the trajectory grid")]
    OffGrid { t: f64 },

    #[error("time {t} outside stored range [{lower}, {upper}]")]
    OutOfRange { t: f64, lower: f64, upper: f64 },

    #[error("non-positive {component} = {value} at t = {t}")]
    NonPositive {
        component: &'static str,
        value: f64,
        t: f64,
    },

    #[error("{0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
