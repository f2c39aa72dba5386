use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A hypothesis or a structural precondition was not met.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Model parameters are outside the boundedness regime.
    #[error("parameters are outside the theorem regime: {0}")]
    OutOfRegime(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("signal kernel evaluated at non-positive argument {0}")]
    KernelDomain(f64),

    #[error("non-finite value {value} at cell {cell} ({what})")]
    NonFinite {
        what: &'static str,
        cell: usize,
        value: f64,
    },

    #[error(
        "u became negative ({value:e}) at cell {cell}; scheme unstable, reduce the CFL safety factor"
    )]
    Negativity { cell: usize, value: f64 },

    #[error("{field} must stay strictly positive, found {value:e} at cell {cell}")]
    Positivity {
        field: &'static str,
        cell: usize,
        value: f64,
    },

    #[error("linear solver for {field} did not converge in {iters} iterations (residual {residual:e})")]
    LinearSolver {
        field: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("time step collapsed to {0:e}")]
    TimeStepCollapse(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical scheme (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::KernelDomain(_)
                | Error::NonFinite { .. }
                | Error::Negativity { .. }
                | Error::Positivity { .. }
                | Error::LinearSolver { .. }
                | Error::TimeStepCollapse(_)
                | Error::Internal(_)
        )
    }
}
