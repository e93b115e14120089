//! Numerical core for an Amari-type neural field on the plane:
//!
//! * periodic spectral grids with FFT convolution ([`grid`], [`spectral`]),
//! * the difference-of-Gaussians connectivity kernel and its thresholds
//!   ([`kernel`]),
//! * firing-rate nonlinearities ([`response`]),
//! * time integration and the input-to-stationary-state map ([`dynamics`]),
//! * the residue-series toolkit for the 1D reduced kernel and the Heaviside
//!   response, with certified zero localization ([`analytic`]),
//! * stimulus generators, binary patterns, the log-polar retino-cortical
//!   warp and exact grid symmetries ([`stimulus`], [`imaging`], [`euclid`]),
//! * exact control synthesis for the linear semigroup and the nonlinear
//!   flow ([`control`]),
//! * the verification checks driven by the CLI ([`verify`]).

pub mod analytic;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod euclid;
pub mod grid;
pub mod imaging;
pub mod kernel;
mod par;
pub mod quad;
pub mod response;
pub mod spectral;
pub mod stimulus;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec, Norm};
pub use kernel::{constants, dog_eval, omega_hat, DogParams, KernelConstants};
pub use response::ResponseKind;
