//! Resonant backward four-wave mixing (double-Λ FWM) in an EIT medium.
//!
//! All rates, detunings and Rabi frequencies are expressed in units of the
//! excited-state decay rate Γ. Physical units (kHz, seconds) appear only at
//! the I/O boundary; see [`params`].
//!
//! The crate provides
//! - [`analytic`]: closed-form steady state for balanced drive, resonant
//!   one- and three-photon detunings and no ground-state dephasing,
//! - [`numeric`]: general steady state via a linear-response coherence solve
//!   and a 2×2 transfer-matrix boundary solve,
//! - [`dynamics`]: pulse propagation with adiabatically eliminated optical
//!   coherences,
//! - [`experiments`]: sweeps, peak finding, bandwidth and figure presets,
//! - [`validation`]: the self-check suite behind `dlambda-fwm validate`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod numeric;
pub mod params;
pub mod validation;

pub use error::{Error, Result};
pub use params::{DetuningSet, DriveParams, MediumParams, Scenario, SteadyResult};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
