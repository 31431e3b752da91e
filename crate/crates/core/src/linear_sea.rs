//! Constant-stiffness series elastic actuator.
//!
//! The motor side is a rotor inertia `J` with viscous damping `D`, both
//! reflected through the transmission; the load side is held as a fixed
//! reference. With spring torque `τ = k θ` the plant is
//!
//! ```text
//! J θ̈ + D θ̇ + k θ = τ_act,      τ_out / τ_act = k / (J s² + D s + k)
//! ```
//!
//! The "J_sea" inertia that appears in the saturation-frequency and design
//! relations is taken to be the same reflected inertia `J`; no separate
//! spring-side inertia is modeled.

use num_complex::Complex64;

use crate::{Error, Result};

/// Reflected motor-side inertia (kg·m²) and viscous damping (N·m·s/rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorParams {
    inertia: f64,
    damping: f64,
}

impl ActuatorParams {
    pub fn new(inertia: f64, damping: f64) -> Result<Self> {
        if !(inertia.is_finite() && inertia > 0.0) {
            return Err(Error::invalid("J_act", "inertia must be positive"));
        }
        if !(damping.is_finite() && damping >= 0.0) {
            return Err(Error::invalid("D_act", "damping must be non-negative"));
        }
        Ok(Self { inertia, damping })
    }

    /// 0.005 kg·m², 0.1 N·m·s/rad.
    pub fn reference() -> Self {
        Self::new(0.005, 0.1).expect("reference actuator is valid")
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }
}

/// Stiffness chosen to meet a peak-torque and saturation-frequency target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSeaSpec {
    /// N·m/rad
    pub k_sea: f64,
    /// N·m
    pub tau_max: f64,
    /// rad
    pub theta_max: f64,
    /// rad/s
    pub omega_sat: f64,
}

/// `τ = k θ`.
pub fn linear_torque(spec: &LinearSeaSpec, theta: f64) -> f64 {
    spec.k_sea * theta
}

/// `k / (J (jω)² + D jω + k)`.
pub fn sea_frequency_response(act: &ActuatorParams, k_sea: f64, omega: f64) -> Complex64 {
    let den = Complex64::new(k_sea - act.inertia * omega * omega, act.damping * omega);
    Complex64::new(k_sea, 0.0) / den
}

/// `√(k / J)` in rad/s.
pub fn saturation_frequency(act: &ActuatorParams, k_sea: f64) -> f64 {
    (k_sea / act.inertia).sqrt()
}

/// Stiffness that puts the saturation frequency at `omega_sat`, and the
/// deflection needed to deliver `tau_max` with it.
pub fn design_stiffness(act: &ActuatorParams, omega_sat: f64, tau_max: f64) -> Result<LinearSeaSpec> {
    if !(omega_sat.is_finite() && omega_sat > 0.0) {
        return Err(Error::invalid("omega_sat", "must be positive"));
    }
    if !(tau_max.is_finite() && tau_max > 0.0) {
        return Err(Error::invalid("tau_max", "must be positive"));
    }
    let k_sea = omega_sat * omega_sat * act.inertia;
    Ok(LinearSeaSpec {
        k_sea,
        tau_max,
        theta_max: tau_max / k_sea,
        omega_sat,
    })
}

/// Frequency (rad/s) above which `|k / (J s² + D s + k)|` stays below one:
/// `√(2k/J − D²/J²)`. `None` when the plant is damped enough to never
/// exceed unity gain (`D² ≥ 2 k J`).
pub fn zero_db_crossing(act: &ActuatorParams, k_sea: f64) -> Option<f64> {
    let (j, d) = (act.inertia, act.damping);
    let sq = 2.0 * k_sea / j - d * d / (j * j);
    (sq > 0.0).then(|| sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn torque_is_linear() {
        let spec = LinearSeaSpec {
            k_sea: 1.0,
            tau_max: 1.0,
            theta_max: 1.0,
            omega_sat: 1.0,
        };
        assert_eq!(linear_torque(&spec, 0.5), 0.5);
        let designed = design_stiffness(&ActuatorParams::reference(), 2.0 * PI * 15.0, 15.0).unwrap();
        assert_eq!(linear_torque(&designed, 0.0), 0.0);
        assert!((linear_torque(&designed, designed.theta_max) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn unity_dc_gain() {
        for &(j, d, k) in &[(0.005, 0.1, 44.4), (1.0, 0.0, 3.0), (2.0, 7.0, 0.1)] {
            let act = ActuatorParams::new(j, d).unwrap();
            assert_eq!(sea_frequency_response(&act, k, 0.0), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn gain_at_natural_frequency() {
        let act = ActuatorParams::reference();
        let k = 44.4;
        let w = (k / act.inertia()).sqrt();
        let mag = sea_frequency_response(&act, k, w).norm();
        assert!((mag - k / (act.damping() * w)).abs() < 1e-9);
    }

    #[test]
    fn high_frequency_asymptote() {
        let act = ActuatorParams::reference();
        let k = 44.4;
        let w = 10.0 * (k / act.inertia()).sqrt();
        let mag = sea_frequency_response(&act, k, w).norm();
        let asymptote = k / (act.inertia() * w * w);
        assert!((mag - asymptote).abs() / asymptote < 0.02);
    }

    #[test]
    fn saturation_frequency_values() {
        let unit = ActuatorParams::new(1.0, 0.0).unwrap();
        assert_eq!(saturation_frequency(&unit, 1.0), 1.0);
        let act = ActuatorParams::reference();
        let w = saturation_frequency(&act, 44.4);
        assert!((w - 94.233_7).abs() < 1e-3);
        assert!((w / (2.0 * PI) - 15.0).abs() < 0.01);
        let k0 = 10.0;
        assert!(
            (saturation_frequency(&act, 4.0 * k0) - 2.0 * saturation_frequency(&act, k0)).abs()
                < 1e-12
        );
    }

    #[test]
    fn design_example() {
        let act = ActuatorParams::reference();
        let spec = design_stiffness(&act, 2.0 * PI * 15.0, 15.0).unwrap();
        assert!((spec.k_sea - 44.413_2).abs() < 1e-3);
        assert!((spec.theta_max - 0.337_737).abs() < 1e-5);
        assert!((spec.k_sea - spec.tau_max / spec.theta_max).abs() < 1e-12);

        let unit = ActuatorParams::new(1.0, 0.3).unwrap();
        let spec = design_stiffness(&unit, 1.0, 1.0).unwrap();
        assert_eq!((spec.k_sea, spec.theta_max), (1.0, 1.0));
    }

    #[test]
    fn design_inverts_saturation_frequency() {
        let act = ActuatorParams::new(0.0123, 0.2).unwrap();
        for &w in &[0.5, 3.0, 94.0, 1234.5] {
            let spec = design_stiffness(&act, w, 2.0).unwrap();
            assert!((saturation_frequency(&act, spec.k_sea) - w).abs() / w < 1e-14);
        }
        assert!(design_stiffness(&act, 0.0, 1.0).is_err());
        assert!(design_stiffness(&act, 1.0, -1.0).is_err());
    }

    #[test]
    fn analytic_crossing_matches_scan() {
        let act = ActuatorParams::reference();
        let k = 44.4;
        let crossing = zero_db_crossing(&act, k).unwrap();
        let step = 0.01;
        // last grid point with |H| >= 1
        let mut last_above = 0.0;
        let mut w = step;
        while w < 1000.0 {
            if sea_frequency_response(&act, k, w).norm() >= 1.0 {
                last_above = w;
            }
            w += step;
        }
        assert!((crossing - last_above).abs() <= step);
        assert!(sea_frequency_response(&act, k, 0.5 * crossing).norm() > 1.0);

        let overdamped = ActuatorParams::new(1.0, 10.0).unwrap();
        assert_eq!(zero_db_crossing(&overdamped, 1.0), None);
    }

    #[test]
    fn rejects_bad_actuator() {
        assert!(ActuatorParams::new(0.0, 0.1).is_err());
        assert!(ActuatorParams::new(0.1, -0.1).is_err());
        assert!(ActuatorParams::new(0.1, 0.0).is_ok());
    }
}
