//! Error conditions shared across the crate.

use std::fmt;

/// Everything that can go wrong in this crate.
///
/// Variants carry the concrete location or quantity that triggered the
/// failure so callers can report actionable diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A sampled function produced a non-finite value at a grid node.
    NonFiniteSample { node: Vec<f64>, value: f64 },
    /// Two fields with different grids were combined.
    GridMismatch { left: String, right: String },
    /// A Fourier multiplier evaluated to a non-finite value.
    NonFiniteMultiplier { xi: Vec<f64> },
    /// Kernel parameters violate 0 < sigma1, sigma1*sqrt(kappa) < sigma2.
    InvalidDogParams(String),
    /// The contraction premise mu < threshold does not hold.
    ContractionViolation { mu: f64, threshold: f64 },
    /// Fixed-point iteration hit the cap before reaching tolerance.
    NonConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },
    /// Time integration produced a non-finite state.
    BlowUp { last_valid_t: f64 },
    /// Complex evaluation requested too close to a pole of K-hat.
    NearPole { z: (f64, f64), h_abs: f64 },
    /// Series evaluation requested outside its domain (x = 0, or x <= 0 for b).
    SeriesDomain { x: f64, reason: &'static str },
    /// Quadrature failed to reach the requested accuracy.
    QuadratureFailure { achieved: f64, requested: f64 },
    /// A zero bracket did not contain a sign change.
    BracketFailure { k: usize, lo: f64, hi: f64 },
    /// Group element is not an exact node permutation.
    UnsupportedGroupElement(String),
    /// Control horizon exceeds the admissible small-time bound.
    HorizonTooLong { tau: f64, tau_max: f64 },
    /// The linear control multiplier is numerically singular at a frequency.
    NearSingularControl { xi: Vec<f64>, gap: f64 },
    /// A configuration or argument is invalid for the requested operation.
    Invalid(String),
    /// Underlying I/O failure (serialization, image output).
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFiniteSample { node, value } => {
                write!(f, "non-finite sample {value} at node {node:?}")
            }
            Error::GridMismatch { left, right } => {
                write!(f, "grid mismatch: {left} vs {right}")
            }
            Error::NonFiniteMultiplier { xi } => {
                write!(f, "multiplier is non-finite at frequency {xi:?}")
            }
            Error::InvalidDogParams(msg) => write!(f, "invalid DoG parameters: {msg}"),
            Error::ContractionViolation { mu, threshold } => {
                write!(f, "contraction violated: mu = {mu} >= {threshold}")
            }
            Error::NonConvergence {
                iterations,
                residual,
                tolerance,
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:.3e}, tol {tolerance:.3e})"
            ),
            Error::BlowUp { last_valid_t } => {
                write!(f, "state blew up; last finite state at t = {last_valid_t}")
            }
            Error::NearPole { z, h_abs } => write!(
                f,
                "K-hat evaluated too close to a pole at z = {} + {}i (|h| = {h_abs:.3e})",
                z.0, z.1
            ),
            Error::SeriesDomain { x, reason } => {
                write!(f, "series undefined at x = {x}: {reason}")
            }
            Error::QuadratureFailure {
                achieved,
                requested,
            } => write!(
                f,
                "quadrature reached {achieved:.3e}, requested {requested:.3e}"
            ),
            Error::BracketFailure { k, lo, hi } => {
                write!(f, "no sign change in bracket k={k}: ({lo}, {hi})")
            }
            Error::UnsupportedGroupElement(msg) => {
                write!(f, "unsupported group element: {msg}")
            }
            Error::HorizonTooLong { tau, tau_max } => {
                write!(f, "horizon tau = {tau} exceeds admissible tau_max = {tau_max}")
            }
            Error::NearSingularControl { xi, gap } => write!(
                f,
                "control multiplier nearly singular at frequency {xi:?} (gap {gap:.3e})"
            ),
            Error::Invalid(msg) => write!(f, "{msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
