use thiserror::Error;

/// Errors raised by the analytical engine, the simulator and the experiment runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value violates one of its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// A closed-form term overflowed or became non-finite.
    #[error("numeric range exceeded in {term}")]
    NumericRange { term: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("quadrature did not converge: achieved relative error {achieved:.3e} (target {target:.1e})")]
    Quadrature { achieved: f64, target: f64 },

    #[error("non-finite value in Monte Carlo trial {trial}: {detail}")]
    NonFinite { trial: u64, detail: String },

    /// A config file could not be parsed.
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// Failure while evaluating one point of a placement sweep.
    #[error("at grid point (x={x}, y={y}): {source}")]
    GridPoint { x: f64, y: f64, source: Box<Error> },
}

impl Error {
    /// Short machine-readable category used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) | Error::UnsupportedParameter(_) => "validation",
            Error::Argument(_) => "argument",
            Error::NumericRange { .. } | Error::Quadrature { .. } | Error::NonFinite { .. } => "numeric",
            Error::Parse(_) => "config",
            Error::Io(_) => "io",
            Error::GridPoint { source, .. } => source.category(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
