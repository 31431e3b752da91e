//! Torque and stiffness laws of the nonlinear series elastic element.
//!
//! Two bars pivot coaxially; `n` tension springs join a point at radius `R`
//! on one bar to a point at radius `r` on the other. At zero relative
//! deflection every spring sits at its rest length `R - r`, so the element
//! has zero stiffness at rest and stiffens as it deflects.
//!
//! Two torque laws are provided:
//!
//! - the exact geometric law, used by the physical simulation path, and
//! - the rational law `n k_s β θ³ / (α + θ²)`, which is what the describing
//!   function and the amplitude inversion are built on.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Geometry and spring constants of the elastic element.
///
/// `alpha = 2 (R - r)² / (R r)` and `beta = R r` are derived on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NseeGeometry {
    springs: u32,
    spring_stiffness: f64,
    outer_radius: f64,
    inner_radius: f64,
    alpha: f64,
    beta: f64,
}

impl NseeGeometry {
    /// `spring_stiffness` in N/m, radii in m.
    pub fn new(
        springs: u32,
        spring_stiffness: f64,
        outer_radius: f64,
        inner_radius: f64,
    ) -> Result<Self> {
        if springs < 1 {
            return Err(Error::invalid("n", "spring count must be at least 1"));
        }
        if !(spring_stiffness.is_finite() && spring_stiffness > 0.0) {
            return Err(Error::invalid("k_s", "spring stiffness must be positive"));
        }
        if !(inner_radius.is_finite() && inner_radius > 0.0) {
            return Err(Error::invalid("r", "inner radius must be positive"));
        }
        if !(outer_radius.is_finite() && outer_radius > inner_radius) {
            return Err(Error::invalid(
                "R",
                format!("outer radius must satisfy R > r (R = {outer_radius}, r = {inner_radius})"),
            ));
        }
        let offset = outer_radius - inner_radius;
        Ok(Self {
            springs,
            spring_stiffness,
            outer_radius,
            inner_radius,
            alpha: 2.0 * offset * offset / (outer_radius * inner_radius),
            beta: outer_radius * inner_radius,
        })
    }

    /// Four 32 N/mm springs on 70 mm / 40 mm radii.
    pub fn reference() -> Self {
        Self::new(4, 32_000.0, 0.07, 0.04).expect("reference geometry is valid")
    }

    pub fn springs(&self) -> u32 {
        self.springs
    }

    pub fn spring_stiffness(&self) -> f64 {
        self.spring_stiffness
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// `2 (R - r)² / (R r)`, in rad².
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `R r`, in m².
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Spring rest length `R - r`.
    pub fn rest_length(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// `n k_s β`: the large-deflection slope of the rational law and the
    /// upper bound of the describing function.
    pub fn asymptotic_stiffness(&self) -> f64 {
        f64::from(self.springs) * self.spring_stiffness * self.beta
    }

    /// Distance between the two spring attachment points,
    /// `√(R² + r² − 2 R r cosθ)`.
    pub fn spring_length(&self, theta: f64) -> Result<f64> {
        check_deflection(theta)?;
        Ok(self.stretched(theta).0)
    }

    /// Tension carried by each spring (Hooke's law about the rest length).
    pub fn spring_tension(&self, theta: f64) -> Result<f64> {
        check_deflection(theta)?;
        Ok(self.spring_stiffness * self.stretched(theta).1)
    }

    /// Output torque of the element from the exact geometry,
    /// `n k_s R r (1 − (R − r)/l) sinθ`.
    pub fn torque_exact(&self, theta: f64) -> Result<f64> {
        check_deflection(theta)?;
        let (length, stretch) = self.stretched(theta);
        Ok(self.lever_gain() * stretch / length * theta.sin())
    }

    /// Elastic energy stored in all springs.
    pub fn potential_energy(&self, theta: f64) -> Result<f64> {
        check_deflection(theta)?;
        let stretch = self.stretched(theta).1;
        Ok(f64::from(self.springs) * 0.5 * self.spring_stiffness * stretch * stretch)
    }

    /// Analytic `dτ/dθ` of [`torque_exact`](Self::torque_exact).
    pub fn stiffness_exact(&self, theta: f64) -> Result<f64> {
        check_deflection(theta)?;
        let (length, stretch) = self.stretched(theta);
        let rest = self.rest_length();
        let (sin, cos) = theta.sin_cos();
        // dl/dθ = R r sinθ / l
        let geometric = rest * self.beta * sin * sin / (length * length * length);
        Ok(self.lever_gain() * (geometric + stretch / length * cos))
    }

    /// Rational small-deflection law `n k_s β θ³ / (α + θ²)`. Defined for all
    /// finite θ.
    pub fn torque_maclaurin(&self, theta: f64) -> f64 {
        let sq = theta * theta;
        self.asymptotic_stiffness() * sq * theta / (self.alpha + sq)
    }

    /// Derivative of [`torque_maclaurin`](Self::torque_maclaurin):
    /// `n k_s β θ² (3α + θ²) / (α + θ²)²`.
    pub fn stiffness_maclaurin(&self, theta: f64) -> f64 {
        let sq = theta * theta;
        let den = self.alpha + sq;
        self.asymptotic_stiffness() * sq * (3.0 * self.alpha + sq) / (den * den)
    }

    fn lever_gain(&self) -> f64 {
        f64::from(self.springs) * self.spring_stiffness * self.outer_radius * self.inner_radius
    }

    /// `(l, l − (R − r))` from `l² = (R − r)² + 4 R r sin²(θ/2)`, which
    /// stays exact at rest where the cosine form cancels.
    fn stretched(&self, theta: f64) -> (f64, f64) {
        let rest = self.rest_length();
        let half = (0.5 * theta).sin();
        let lift = 4.0 * self.beta * half * half;
        let length = (rest * rest + lift).sqrt();
        (length, lift / (length + rest))
    }
}

/// Relative deflection of the two bars and its rate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DeflectionState {
    pub theta: f64,
    pub theta_dot: f64,
}

impl DeflectionState {
    pub fn new(theta: f64, theta_dot: f64) -> Self {
        Self { theta, theta_dot }
    }

    /// `self + h * rate`, component-wise.
    pub fn advanced(self, rate: DeflectionState, h: f64) -> Self {
        Self {
            theta: self.theta + h * rate.theta,
            theta_dot: self.theta_dot + h * rate.theta_dot,
        }
    }
}

/// Past ±π the bars fold through opposition and the geometry is meaningless.
pub fn check_deflection(theta: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() < PI {
        Ok(())
    } else {
        Err(Error::DeflectionOutOfRange { theta })
    }
}
