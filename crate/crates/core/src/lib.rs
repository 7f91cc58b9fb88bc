//! Boundary control synthesis for the linear KdV equation
//! `y_t + y_xxx + a y_x = 0` on `x in [-1, 0]`, driven through the left
//! Dirichlet datum `u(t) = y(-1, t)`, plus the numerical machinery used to
//! verify the constructions: an independent PDE solver, energy estimates,
//! Airy-kernel solutions on the line, and norm-inequality sweeps.
//!
//! The state is parameterized by a flat output `z(t) = y_xx(0, t)` through
//! the series `y = sum_i g_i(x) z^(i)(t)`; everything downstream (control
//! signals, residual certificates, truncation bounds) works on truncated
//! Taylor jets of `z`, never on finite differences.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod airy;
pub mod analysis;
pub mod cheb;
pub mod flatout;
pub mod genfun;
pub mod jet;
pub mod linalg;
pub mod pde;
pub mod quad;
pub mod rng;
pub mod synth;

use core::fmt;

/// Crate-wide error type. Variants carry a short static description of the
/// violated precondition or the numerical failure mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    InvalidArgument(&'static str),
    /// Jet division by a series with vanishing constant term.
    SingularJet,
    /// Argument outside the domain a representation is certified on.
    Domain(&'static str),
    /// Result would overflow the working precision.
    Overflow(&'static str),
    /// A discrete representation is too coarse for the request.
    InsufficientResolution(&'static str),
    /// Requested derivative depth exceeds the certified cap.
    DepthExceeded(&'static str),
    /// A target state violates the reachable-class boundary conditions.
    NotReachable(&'static str),
    /// A time-stepping run left the contraction regime.
    Unstable(&'static str),
    /// A series tail cannot be bounded under the supplied envelope.
    DivergenceRisk(&'static str),
    /// A linear system factorization hit a zero pivot.
    SingularMatrix,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::SingularJet => write!(f, "jet division by zero constant term"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Overflow(m) => write!(f, "overflow: {m}"),
            Error::InsufficientResolution(m) => write!(f, "insufficient resolution: {m}"),
            Error::DepthExceeded(m) => write!(f, "depth exceeded: {m}"),
            Error::NotReachable(m) => write!(f, "target not reachable: {m}"),
            Error::Unstable(m) => write!(f, "unstable run: {m}"),
            Error::DivergenceRisk(m) => write!(f, "divergence risk: {m}"),
            Error::SingularMatrix => write!(f, "singular matrix"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
