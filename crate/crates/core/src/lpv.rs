//! Amplitude-scheduled plant
//!
//! ```text
//! G(s, A) = K N_τ(A) / (J s² + D s + K N_τ(A))
//! ```
//!
//! i.e. the constant-stiffness transfer function with `k = K N_τ(A)`. `K` is
//! a free positive scalar (default 1). The schedule export lists, per
//! deflection amplitude, the quantities a gain-scheduled design consumes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::describing::df_closed_form;
use crate::linear_sea::{sea_frequency_response, zero_db_crossing, ActuatorParams};
use crate::nsee::NseeGeometry;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpvPlant {
    gain: f64,
    actuator: ActuatorParams,
    geometry: NseeGeometry,
}

impl LpvPlant {
    pub fn new(gain: f64, actuator: ActuatorParams, geometry: NseeGeometry) -> Result<Self> {
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::invalid("K", "plant gain must be positive"));
        }
        Ok(Self {
            gain,
            actuator,
            geometry,
        })
    }

    /// `K = 1`.
    pub fn unit_gain(actuator: ActuatorParams, geometry: NseeGeometry) -> Self {
        Self {
            gain: 1.0,
            actuator,
            geometry,
        }
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn actuator(&self) -> &ActuatorParams {
        &self.actuator
    }

    pub fn geometry(&self) -> &NseeGeometry {
        &self.geometry
    }

    /// `K N_τ(A)`, N·m/rad.
    pub fn scheduled_stiffness(&self, amplitude: f64) -> Result<f64> {
        Ok(self.gain * df_closed_form(&self.geometry, amplitude)?)
    }

    /// Frequency above which `|G(jω, A)| < 1` for good, rad/s.
    pub fn zero_db_crossing(&self, amplitude: f64) -> Result<Option<f64>> {
        Ok(zero_db_crossing(&self.actuator, self.scheduled_stiffness(amplitude)?))
    }
}

/// `G(jω, A)`.
pub fn lpv_response(plant: &LpvPlant, omega: f64, amplitude: f64) -> Result<Complex64> {
    let k = plant.scheduled_stiffness(amplitude)?;
    let (j, d) = (plant.actuator.inertia(), plant.actuator.damping());
    let den = Complex64::new(k - j * omega * omega, d * omega);
    Ok(Complex64::new(k, 0.0) / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEntry {
    /// rad
    pub amplitude: f64,
    /// `N_τ(A)`, N·m/rad
    pub n_tau: f64,
    /// `√(K N_τ / J) / 2π`, Hz
    pub natural_frequency_hz: f64,
    /// `D / (2 √(J K N_τ))`
    pub damping_ratio: f64,
}

pub fn export_schedule(plant: &LpvPlant, amplitudes: &[f64]) -> Result<Vec<ScheduleEntry>> {
    let (j, d) = (plant.actuator.inertia(), plant.actuator.damping());
    amplitudes
        .iter()
        .map(|&amplitude| {
            let n_tau = df_closed_form(&plant.geometry, amplitude)?;
            let k = plant.gain * n_tau;
            Ok(ScheduleEntry {
                amplitude,
                n_tau,
                natural_frequency_hz: (k / j).sqrt() / (2.0 * PI),
                damping_ratio: d / (2.0 * (j * k).sqrt()),
            })
        })
        .collect()
}

/// `|G(jω, A)|` for every (A, ω) pair, rows by amplitude.
pub fn bode_magnitudes(plant: &LpvPlant, amplitudes: &[f64], omegas: &[f64]) -> Result<Vec<Vec<f64>>> {
    amplitudes
        .iter()
        .map(|&a| omegas.iter().map(|&w| lpv_response(plant, w, a).map(|g| g.norm())).collect())
        .collect()
}

/// Same evaluation routed through the constant-stiffness transfer function.
pub fn linear_equivalent_response(plant: &LpvPlant, omega: f64, amplitude: f64) -> Result<Complex64> {
    Ok(sea_frequency_response(
        &plant.actuator,
        plant.scheduled_stiffness(amplitude)?,
        omega,
    ))
}
