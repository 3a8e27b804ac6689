//! Rabi oscillation curves for a two-level atom coupled to a single cavity
//! mode, under either the standard (irreducible) field quantization or a
//! finite ensemble of `N` oscillators of indefinite frequency.
//!
//! The ideal-cavity excited-state probability is always a finite weighted sum
//! of sinusoids,
//!
//! ```text
//! p+(t) = sum_i ( A_i + B_i sin^2(Omega_i t) )
//! ```
//!
//! built by [`terms`] from the field state (vacuum, thermal or coherent) and
//! the representation choice. [`decoherence`] damps these terms with cavity
//! energy loss `exp(-kappa t)` and with a Gamma-distributed uncertainty in
//! the interaction duration, for which a closed form and an independent
//! quadrature evaluator are both provided. [`curves`] samples probability
//! curves on time grids and [`analysis`] runs the empirical procedures on
//! top: time-uncertainty fits, damping-hypothesis comparison, lower-bound
//! scans on the oscillator-number product `N*Z`, and collapse/revival
//! detection.
//!
//! Units: times in microseconds, angular frequencies and rates in rad/us
//! and 1/us. A coupling quoted as `g_ph/pi = 47 kHz` is
//! `g_ph = pi * 0.047 rad/us`, giving the familiar ~21.3 us vacuum Rabi
//! period at resonance.
//!
//! With the default `parallel` feature, curve sampling and parameter scans
//! fan out over a rayon pool; disabling the feature yields a fully
//! sequential build with identical results.

pub mod analysis;
pub mod curves;
pub mod decoherence;
mod error;
pub mod model;
pub(crate) mod par;
pub mod terms;

pub use error::{Error, Result};
