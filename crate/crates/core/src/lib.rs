//! Modeling and frequency-domain analysis of series elastic actuators whose
//! elastic element is a two-bar, tension-spring mechanism with deflection
//! dependent stiffness.
//!
//! The crate is split along the analysis pipeline:
//!
//! - [`nsee`]: exact and rational (small-deflection) torque/stiffness laws of
//!   the nonlinear elastic element.
//! - [`linear_sea`]: the constant-stiffness baseline and stiffness design from
//!   torque and bandwidth requirements.
//! - [`describing`]: closed-form describing function, its Fourier-quadrature
//!   check, and torque-amplitude to deflection-amplitude inversion.
//! - [`dynamics`]: fixed-step RK4 simulation of the full nonlinear actuator
//!   and of its quasi-linear describing-function surrogate.
//! - [`freq_response`]: RMS-gain sweeps and 0 dB crossing extraction.
//! - [`lpv`]: the amplitude-scheduled plant and gain-schedule export.
//!
//! Units are SI throughout: radians, meters, newtons, seconds. Frequencies
//! are in Hz only where a type says so explicitly.

pub mod describing;
pub mod dynamics;
mod error;
pub mod freq_response;
pub mod linear_sea;
pub mod lpv;
pub mod nsee;

pub use error::{Error, Result};
