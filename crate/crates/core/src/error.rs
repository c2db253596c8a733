use alloc::string::String;
use core::fmt;

use crate::signal::Shape;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid argument or configuration value.
    Parameter(String),
    /// Two signals (or a signal and a functional) disagree on geometry.
    ShapeMismatch { expected: Shape, found: Shape },
    /// Input contains NaN or infinite values.
    NonFinite,
    /// An iterative solver hit its iteration cap before reaching tolerance.
    Solver {
        step: Option<usize>,
        iterations: usize,
        residual: f64,
    },
    /// A candidate eigenfunction failed the prox probe.
    Certification { residual: f64, tol: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Attaches a path step index to a solver failure.
    pub(crate) fn at_step(self, k: usize) -> Self {
        match self {
            Error::Solver {
                iterations,
                residual,
                ..
            } => Error::Solver {
                step: Some(k),
                iterations,
                residual,
            },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite => write!(f, "signal contains non-finite values"),
            Error::Solver {
                step: Some(k),
                iterations,
                residual,
            } => write!(
                f,
                "solver did not converge at step {k} after {iterations} iterations (residual {residual:e})"
            ),
            Error::Solver {
                step: None,
                iterations,
                residual,
            } => write!(
                f,
                "solver did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::Certification { residual, tol } => write!(
                f,
                "eigenfunction certification failed: residual {residual:e} exceeds {tol:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}
