//! Series-form ODE integration for polynomial systems.
//!
//! A state value is stored as a short power series in the step size τ —
//! the analog of a positional numeral with base τ⁻¹ — and advanced with the
//! first-order explicit scheme expressed directly on the series coefficients.
//! A carry-like digit-shifting procedure keeps every coefficient bounded by
//! τ⁻¹ while preserving the represented value, so the series iterate tracks
//! the plain finite-difference iterate to machine precision.
//!
//! On top of the representation the crate provides:
//!
//! * [`integrator`] — the series-form stepper, a split form that separates a
//!   regular block from a trailing quasi-random block, and extraction of the
//!   trailing coefficients as a deterministic pseudo-random sequence;
//! * [`linear_approx`] — a piecewise-linear analytic approximation whose
//!   segment slopes are exact integer-arithmetic evaluations of the right-hand
//!   side at the integer part of the state;
//! * [`reference`] — a plain explicit Euler oracle, closed-form solutions of
//!   the builtin quadratic example system, and trajectory comparison;
//! * [`stats`] — chi-square and Kolmogorov–Smirnov uniformity statistics for
//!   the extracted trailing sequences.
//!
//! The crate is `no_std` (with `alloc`); all operations are deterministic.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

use core::fmt;

use alloc::string::String;

pub mod integrator;
pub mod linear_approx;
pub mod reference;
pub mod stats;
pub mod systems;
pub mod tau_series;

/// Errors shared across the crate's modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point or coefficient vector had the wrong number of components.
    DimensionMismatch { expected: usize, got: usize },
    /// A split was requested with block boundaries out of order or range.
    InvalidSplit { q: usize, p: usize },
    /// Only the first-order explicit scheme is implemented.
    UnsupportedSchemeOrder { order: usize },
    /// No builtin system with this id.
    UnknownSystem(String),
    /// A state component became non-finite during integration.
    NonFinite { step: usize },
    /// The trajectory was produced without series-state snapshots.
    MissingSeriesStates,
    /// The requested trailing-coefficient index is outside (q, p].
    InvalidCoeffIndex { index: usize, q: usize, p: usize },
    /// |G| ≥ 1/τ at an integer lattice point: the linear approximation's
    /// premise fails and τ must be reduced.
    SlopeTooLarge {
        component: usize,
        slope: f64,
        limit: f64,
        t: f64,
    },
    /// Closed-form expression evaluated outside its domain (aτ too large).
    DomainExceeded { a: u64, tau: f64 },
    /// Two trajectories cannot be compared (different τ or length).
    ShapeMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidSplit { q, p } => {
                write!(f, "invalid split: require q < p within the series, got q={q}, p={p}")
            }
            Error::UnsupportedSchemeOrder { order } => {
                write!(f, "unsupported scheme order {order}: only order 1 is implemented")
            }
            Error::UnknownSystem(name) => write!(f, "unknown system `{name}`"),
            Error::NonFinite { step } => {
                write!(f, "state became non-finite at step {step}")
            }
            Error::MissingSeriesStates => {
                write!(f, "trajectory carries no series-state snapshots")
            }
            Error::InvalidCoeffIndex { index, q, p } => {
                write!(f, "coefficient index {index} outside the trailing band ({q}, {p}]")
            }
            Error::SlopeTooLarge {
                component,
                slope,
                limit,
                t,
            } => write!(
                f,
                "slope too large on component {component} at t={t}: |{slope}| >= {limit}; reduce tau"
            ),
            Error::DomainExceeded { a, tau } => {
                write!(f, "closed form out of domain: a={a} with tau={tau}")
            }
            Error::ShapeMismatch => write!(f, "trajectories have different shape"),
        }
    }
}

impl core::error::Error for Error {}

/// x^n by repeated multiplication; exact for integer-valued `x` while the
/// result stays within 2^53.
pub(crate) fn powu(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}
