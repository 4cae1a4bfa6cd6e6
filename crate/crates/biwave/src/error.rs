//! Crate-wide error type.
//!
//! Numerical routines report failures with enough data to act on them:
//! a quadrature that stalls still hands back its best estimate and error
//! bound, a bracketing failure reports the interval, a trajectory that
//! escapes its tabulated window reports the exit time.

use std::fmt;

/// Errors produced by the solvers, decompositions and job runners.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid argument, configuration value, or precondition violation.
    Invalid(String),
    /// Adaptive quadrature exhausted its interval budget before reaching
    /// the requested tolerance. The best estimate is still available.
    QuadratureDidNotConverge {
        estimate: f64,
        error_bound: f64,
        requested: f64,
    },
    /// Root bracketing failure: the function does not change sign.
    NoSignChange { a: f64, b: f64 },
    /// An ODE integration step shrank below the allowed minimum.
    StepUnderflow { t: f64, dt: f64 },
    /// Interpolation was requested outside the tabulated range.
    OutOfRange { x: f64, lo: f64, hi: f64 },
    /// The eigenvalue solver failed to converge or lost its bracket.
    SolverFailed(String),
    /// An energy window selected no eigenvalue (or more than one).
    NoEigenvalueInWindow { lo: f64, hi: f64 },
    /// A numerical procedure failed in a way that retrying cannot fix
    /// (asymptote not reached, non-finite intermediate, ...).
    Numerical(String),
    /// A trajectory left the truncation window before its end time.
    LeftWindow { t: f64, x: f64 },
    /// The requested object is singular at one or more nodes
    /// (type-two nodes of a non-eigenstate input).
    SingularNodes(Vec<f64>),
    /// File or process error from the job layer.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::QuadratureDidNotConverge {
                estimate,
                error_bound,
                requested,
            } => write!(
                f,
                "quadrature did not converge: estimate {estimate:e}, \
                 error bound {error_bound:e} > requested {requested:e}"
            ),
            Error::NoSignChange { a, b } => {
                write!(f, "no sign change on [{a}, {b}]; cannot bracket a root")
            }
            Error::StepUnderflow { t, dt } => {
                write!(f, "ODE step underflow at t = {t} (dt = {dt:e})")
            }
            Error::OutOfRange { x, lo, hi } => {
                write!(f, "evaluation at x = {x} outside tabulated range [{lo}, {hi}]")
            }
            Error::SolverFailed(msg) => write!(f, "eigenvalue solver failed: {msg}"),
            Error::NoEigenvalueInWindow { lo, hi } => {
                write!(f, "energy window [{lo}, {hi}] does not select exactly one eigenvalue")
            }
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::LeftWindow { t, x } => {
                write!(f, "trajectory left the truncation window at t = {t} (x = {x})")
            }
            Error::SingularNodes(xs) => {
                write!(f, "singular (type-two) nodes at {xs:?}")
            }
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
