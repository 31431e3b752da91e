//! Describing function of the elastic element.
//!
//! For a deflection `θ = A sin φ` pushed through the rational torque law
//! `n k_s β θ³ / (α + θ²)`, the fundamental of the output is `N_τ(A) A sin φ`
//! with
//!
//! ```text
//! N_τ(A) = n k_s β { 1 + (2α / A²) (1 / √(1 + A²/α) − 1) }
//! ```
//!
//! The cosine fundamental vanishes because the law is odd and memoryless, so
//! `N_τ` is a real gain. [`df_numeric`] recomputes both Fourier coefficients
//! by quadrature and is the independent check on the closed form.
//!
//! The simulation side needs the inverse problem: given a torque amplitude,
//! find the deflection amplitude. That is solved by Newton iteration on the
//! rational law, started from the nearest entry of a pre-sampled
//! [`TorqueSampleTable`].

use std::f64::consts::PI;

use crate::nsee::NseeGeometry;
use crate::{Error, Result};

pub const DEFAULT_QUADRATURE_NODES: usize = 4096;
pub const MIN_QUADRATURE_NODES: usize = 256;
pub const DEFAULT_TABLE_MAX_THETA: f64 = 1.5;
pub const DEFAULT_TABLE_SAMPLES: usize = 301;
pub const NEWTON_TOLERANCE: f64 = 1e-9;
pub const NEWTON_MAX_ITERATIONS: usize = 50;

/// A deflection amplitude together with its equivalent gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescribingFunctionValue {
    /// rad
    pub amplitude: f64,
    /// N·m/rad
    pub gain: f64,
}

impl DescribingFunctionValue {
    pub fn evaluate(geom: &NseeGeometry, amplitude: f64) -> Result<Self> {
        Ok(Self {
            amplitude,
            gain: df_closed_form(geom, amplitude)?,
        })
    }
}

/// First-harmonic Fourier coefficients of the torque response to `A sin φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierFundamental {
    /// cosine coefficient, N·m
    pub a1: f64,
    /// sine coefficient, N·m
    pub b1: f64,
    /// `b1 / A`, N·m/rad
    pub gain: f64,
}

/// Closed-form describing function `N_τ(A)`.
///
/// Evaluated through the cancellation-free rearrangement
/// `n k_s β · x (s + 2) / (s (1 + s)²)` with `x = A²/α`, `s = √(1 + x)`,
/// which is algebraically identical to the textbook form but keeps full
/// relative precision as `A → 0`.
pub fn df_closed_form(geom: &NseeGeometry, amplitude: f64) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::invalid("A", "deflection amplitude must be positive"));
    }
    let x = amplitude * amplitude / geom.alpha();
    let s = (1.0 + x).sqrt();
    let one_plus = 1.0 + s;
    Ok(geom.asymptotic_stiffness() * x * (s + 2.0) / (s * one_plus * one_plus))
}

/// Fundamental Fourier coefficients of `τ_mac(A sin φ)` by the composite
/// trapezoid rule on `n_quad` uniform nodes over one period.
pub fn df_numeric(geom: &NseeGeometry, amplitude: f64, n_quad: usize) -> Result<FourierFundamental> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::invalid("A", "deflection amplitude must be positive"));
    }
    if n_quad < MIN_QUADRATURE_NODES {
        return Err(Error::QuadratureTooCoarse {
            min: MIN_QUADRATURE_NODES,
            got: n_quad,
        });
    }
    let step = 2.0 * PI / n_quad as f64;
    let (mut a1, mut b1) = (0.0, 0.0);
    for k in 0..n_quad {
        let phase = -PI + step * k as f64;
        let (sin, cos) = phase.sin_cos();
        let tau = geom.torque_maclaurin(amplitude * sin);
        a1 += tau * cos;
        b1 += tau * sin;
    }
    // periodic integrand: the trapezoid end weights fold into a plain sum
    a1 *= step / PI;
    b1 *= step / PI;
    Ok(FourierFundamental {
        a1,
        b1,
        gain: b1 / amplitude,
    })
}

/// Quasi-linear spring law `N_τ(A) θ`.
pub fn equivalent_torque(geom: &NseeGeometry, amplitude: f64, theta: f64) -> Result<f64> {
    Ok(df_closed_form(geom, amplitude)? * theta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueSample {
    pub theta: f64,
    pub torque: f64,
}

/// `(θ_i, τ_mac(θ_i))` on a uniform grid over `[0, θ_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueSampleTable {
    samples: Vec<TorqueSample>,
}

/// Result of a torque-to-deflection amplitude inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeInversion {
    /// rad
    pub amplitude: f64,
    /// Newton updates applied after the table lookup.
    pub iterations: usize,
    /// Table node the iteration started from.
    pub start_theta: f64,
}

pub fn build_sample_table(
    geom: &NseeGeometry,
    theta_table_max: f64,
    n_samples: usize,
) -> Result<TorqueSampleTable> {
    if !(theta_table_max.is_finite() && theta_table_max > 0.0) {
        return Err(Error::invalid("theta_table_max", "must be positive"));
    }
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", "need at least two samples"));
    }
    let spacing = theta_table_max / (n_samples - 1) as f64;
    let samples = (0..n_samples)
        .map(|i| {
            let theta = if i == n_samples - 1 {
                theta_table_max
            } else {
                spacing * i as f64
            };
            TorqueSample {
                theta,
                torque: geom.torque_maclaurin(theta),
            }
        })
        .collect();
    Ok(TorqueSampleTable { samples })
}

impl TorqueSampleTable {
    pub fn with_defaults(geom: &NseeGeometry) -> Self {
        build_sample_table(geom, DEFAULT_TABLE_MAX_THETA, DEFAULT_TABLE_SAMPLES)
            .expect("default table parameters are valid")
    }

    pub fn samples(&self) -> &[TorqueSample] {
        &self.samples
    }

    pub fn max_torque(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.torque)
    }

    /// Index of the sample whose torque is closest to `torque`.
    pub fn nearest(&self, torque: f64) -> usize {
        let upper = self.samples.partition_point(|s| s.torque < torque);
        if upper == 0 {
            return 0;
        }
        if upper == self.samples.len() {
            return upper - 1;
        }
        let below = torque - self.samples[upper - 1].torque;
        let above = self.samples[upper].torque - torque;
        if above < below {
            upper
        } else {
            upper - 1
        }
    }

    /// Deflection amplitude whose rational-law torque equals `torque`.
    ///
    /// Each update is `θ ← θ − (τ(θ) − A_τ)(α + θ²)² / (n k_s β (3α + θ²) θ²)`,
    /// repeated until the torque residual is below `1e-9 · max(1, A_τ)`.
    pub fn invert(&self, geom: &NseeGeometry, torque: f64) -> Result<AmplitudeInversion> {
        let max = self.max_torque();
        if !(torque.is_finite() && torque > 0.0 && torque <= max) {
            return Err(Error::TorqueOutOfRange { torque, max });
        }
        let mut index = self.nearest(torque);
        if self.samples[index].theta == 0.0 {
            // zero slope at the origin
            index += 1;
        }
        let start_theta = self.samples[index].theta;
        let tolerance = NEWTON_TOLERANCE * torque.max(1.0);
        let (alpha, gain) = (geom.alpha(), geom.asymptotic_stiffness());

        let mut theta = start_theta;
        let mut residual = geom.torque_maclaurin(theta) - torque;
        let mut iterations = 0;
        while residual.abs() >= tolerance {
            if iterations == NEWTON_MAX_ITERATIONS {
                return Err(Error::NoConvergence {
                    iterations,
                    residual,
                });
            }
            let sq = theta * theta;
            let den = alpha + sq;
            theta -= residual * den * den / (gain * (3.0 * alpha + sq) * sq);
            iterations += 1;
            if !(theta.is_finite() && theta > 0.0) {
                return Err(Error::NoConvergence {
                    iterations,
                    residual,
                });
            }
            residual = geom.torque_maclaurin(theta) - torque;
        }
        Ok(AmplitudeInversion {
            amplitude: theta,
            iterations,
            start_theta,
        })
    }
}

/// Deflection amplitude for torque amplitude `torque`; see
/// [`TorqueSampleTable::invert`].
pub fn amplitude_from_torque(
    geom: &NseeGeometry,
    table: &TorqueSampleTable,
    torque: f64,
) -> Result<f64> {
    table.invert(geom, torque).map(|inv| inv.amplitude)
}
