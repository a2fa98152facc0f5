use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {left} values vs {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("points coincide; bearing is undefined")]
    CoincidentPoints,

    #[error("could not place femto site {placed} of {requested} with {min_separation_m} m separation after {attempts} attempts")]
    InfeasibleLayout {
        placed: usize,
        requested: usize,
        min_separation_m: f64,
        attempts: usize,
    },

    #[error("total interference is zero; the link is interference-free")]
    InterferenceFree,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge to {tolerance:e} within {max_intervals} intervals (estimate {estimate})")]
    QuadratureDiverged {
        tolerance: f64,
        max_intervals: usize,
        estimate: f64,
    },

    #[error("bisection not bracketed: {0}")]
    NonBracketing(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
