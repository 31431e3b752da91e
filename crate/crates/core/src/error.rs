use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("deflection {theta} rad is outside the open interval (-pi, pi)")]
    DeflectionOutOfRange { theta: f64 },

    #[error("deflection {theta} rad left (-pi, pi) at t = {time} s")]
    TrajectoryOutOfRange { theta: f64, time: f64 },

    #[error("torque amplitude {torque} N·m is outside the sample table range (0, {max}]")]
    TorqueOutOfRange { torque: f64, max: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("quadrature needs at least {min} nodes, got {got}")]
    QuadratureTooCoarse { min: usize, got: usize },

    #[error("step {dt} s exceeds T/1000 = {limit} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("time series of {len} samples does not cover the window [{start}, {end}] s")]
    WindowTooShort { len: usize, start: f64, end: f64 },

    #[error("sample step {dt} s does not divide the period {period} s")]
    PeriodMismatch { dt: f64, period: f64 },

    #[error("no 0 dB crossing: {reason}")]
    NoZeroCrossing { reason: &'static str },

    #[error("sweep cell ({amplitude} N·m, {frequency} Hz): {source}")]
    SweepCell {
        amplitude: f64,
        frequency: f64,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
