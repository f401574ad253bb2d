use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-facing parameter. `field` is a dotted config path such as `time.dt`.
    #[error("invalid configuration at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{operation} failed to converge (residual {residual:e})")]
    NumericalFailure { operation: &'static str, residual: f64 },

    #[error("step {step} at t={time} failed: Newton residual {residual:e} after {iterations} iterations")]
    StepFailure {
        step: usize,
        time: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("operation not supported in the {0} regime")]
    UnsupportedRegime(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
