//! Time-domain simulation of the actuator under sinusoidal motor torque.
//!
//! ```text
//! J θ̈ + D θ̇ + τ_spring(θ) = A_τ sin(ω t)
//! ```
//!
//! The physical path uses the exact geometric torque law. The describing
//! function path replaces the spring by the constant gain `N_τ(A)`, with `A`
//! the deflection amplitude that the rational law maps to `A_τ`; `A` is
//! frozen for the whole run.
//!
//! Integration is classical fixed-step RK4. The step is chosen so that an
//! integer number of steps spans one input period, which keeps RMS windows
//! aligned with sample boundaries.

use std::f64::consts::PI;

use crate::describing::{df_closed_form, TorqueSampleTable};
use crate::linear_sea::ActuatorParams;
use crate::nsee::{DeflectionState, NseeGeometry};
use crate::{Error, Result};

/// Upper bound on the integration step regardless of frequency.
pub const MAX_STEP: f64 = 1e-4;
/// Minimum number of steps per input period.
pub const MIN_STEPS_PER_PERIOD: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineExcitation {
    amplitude: f64,
    frequency: f64,
}

impl SineExcitation {
    /// `amplitude` in N·m (zero allowed for free response), `frequency` in Hz.
    pub fn new(amplitude: f64, frequency: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::invalid("A_tau", "torque amplitude must be non-negative"));
        }
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(Error::invalid("f", "frequency must be positive"));
        }
        Ok(Self {
            amplitude,
            frequency,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    pub fn torque_at(&self, t: f64) -> f64 {
        self.amplitude * (self.omega() * t).sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Requested step; `None` means `min(1e-4, T/1000)`.
    pub dt: Option<f64>,
    /// Whole input periods to simulate.
    pub periods: u32,
    pub initial: DeflectionState,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: None,
            periods: 2,
            initial: DeflectionState::default(),
        }
    }
}

/// Step layout resolved for one excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    pub steps_per_period: usize,
    pub periods: u32,
}

impl StepPlan {
    pub fn total_steps(&self) -> usize {
        self.steps_per_period * self.periods as usize
    }
}

impl SimConfig {
    pub fn with_periods(periods: u32) -> Self {
        Self {
            periods,
            ..Self::default()
        }
    }

    /// Picks the largest step not exceeding the requested one that divides
    /// the period evenly.
    pub fn plan(&self, exc: &SineExcitation) -> Result<StepPlan> {
        if self.periods < 2 {
            return Err(Error::invalid("periods", "need at least two periods"));
        }
        if !(self.initial.theta.is_finite() && self.initial.theta_dot.is_finite()) {
            return Err(Error::invalid("initial", "initial state must be finite"));
        }
        let period = exc.period();
        let limit = period / MIN_STEPS_PER_PERIOD as f64;
        let requested = match self.dt {
            Some(dt) if !(dt.is_finite() && dt > 0.0) => {
                return Err(Error::invalid("dt", "step must be positive"))
            }
            Some(dt) if dt > limit * (1.0 + 1e-12) => {
                return Err(Error::StepTooLarge { dt, limit })
            }
            Some(dt) => dt,
            None => MAX_STEP.min(limit),
        };
        let steps_per_period = ((period / requested) - 1e-9).ceil().max(1.0) as usize;
        Ok(StepPlan {
            dt: period / steps_per_period as f64,
            steps_per_period,
            periods: self.periods,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub tau_act: f64,
    pub tau_hb: f64,
}

/// Uniformly sampled trajectory, one row per step boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dt: f64,
    samples: Vec<Sample>,
}

impl TimeSeries {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Multiplies every torque and state column by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                t: s.t,
                theta: s.theta * factor,
                theta_dot: s.theta_dot * factor,
                tau_act: s.tau_act * factor,
                tau_hb: s.tau_hb * factor,
            })
            .collect();
        Self {
            dt: self.dt,
            samples,
        }
    }

    pub(crate) fn from_parts(dt: f64, samples: Vec<Sample>) -> Self {
        Self { dt, samples }
    }
}

/// Torque delivered by the elastic element at deflection `theta`.
pub trait SpringLaw {
    fn torque(&self, theta: f64) -> Result<f64>;
}

/// The exact two-bar geometry.
#[derive(Debug, Clone, Copy)]
pub struct ExactSpring(pub NseeGeometry);

impl SpringLaw for ExactSpring {
    fn torque(&self, theta: f64) -> Result<f64> {
        self.0.torque_exact(theta)
    }
}

/// `τ = k θ`. Both the constant-stiffness baseline and the frozen
/// describing-function surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSpring {
    pub stiffness: f64,
}

impl SpringLaw for LinearSpring {
    fn torque(&self, theta: f64) -> Result<f64> {
        Ok(self.stiffness * theta)
    }
}

impl<S: SpringLaw + ?Sized> SpringLaw for &S {
    fn torque(&self, theta: f64) -> Result<f64> {
        (**self).torque(theta)
    }
}

/// One classical RK4 step. `rate` returns `(θ̇, θ̈)` packed as a
/// [`DeflectionState`].
pub fn rk4_step<F, E>(state: DeflectionState, t: f64, dt: f64, mut rate: F) -> std::result::Result<DeflectionState, E>
where
    F: FnMut(f64, DeflectionState) -> std::result::Result<DeflectionState, E>,
{
    let half = 0.5 * dt;
    let k1 = rate(t, state)?;
    let k2 = rate(t + half, state.advanced(k1, half))?;
    let k3 = rate(t + half, state.advanced(k2, half))?;
    let k4 = rate(t + dt, state.advanced(k3, dt))?;
    Ok(DeflectionState {
        theta: state.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
        theta_dot: state.theta_dot
            + dt / 6.0 * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
    })
}

/// Integrates the actuator with an arbitrary spring law.
pub fn simulate<S: SpringLaw>(
    act: &ActuatorParams,
    spring: S,
    exc: &SineExcitation,
    cfg: &SimConfig,
) -> Result<TimeSeries> {
    let plan = cfg.plan(exc)?;
    let (inertia, damping) = (act.inertia(), act.damping());
    let dt = plan.dt;
    let steps = plan.total_steps();

    let located = |theta: f64, time: f64| -> Result<f64> {
        spring.torque(theta).map_err(|err| match err {
            Error::DeflectionOutOfRange { theta } => Error::TrajectoryOutOfRange { theta, time },
            other => other,
        })
    };

    let mut samples = Vec::with_capacity(steps + 1);
    let mut state = cfg.initial;
    samples.push(Sample {
        t: 0.0,
        theta: state.theta,
        theta_dot: state.theta_dot,
        tau_act: exc.torque_at(0.0),
        tau_hb: located(state.theta, 0.0)?,
    });
    for i in 0..steps {
        let t = i as f64 * dt;
        state = rk4_step(state, t, dt, |time, s: DeflectionState| {
            let spring_torque = located(s.theta, time)?;
            Ok::<_, Error>(DeflectionState {
                theta: s.theta_dot,
                theta_dot: (exc.torque_at(time) - damping * s.theta_dot - spring_torque) / inertia,
            })
        })?;
        let t_next = (i + 1) as f64 * dt;
        samples.push(Sample {
            t: t_next,
            theta: state.theta,
            theta_dot: state.theta_dot,
            tau_act: exc.torque_at(t_next),
            tau_hb: located(state.theta, t_next)?,
        });
    }
    Ok(TimeSeries::from_parts(dt, samples))
}

/// Full nonlinear actuator with the exact spring law.
pub fn simulate_physical(
    act: &ActuatorParams,
    geom: &NseeGeometry,
    exc: &SineExcitation,
    cfg: &SimConfig,
) -> Result<TimeSeries> {
    simulate(act, ExactSpring(*geom), exc, cfg)
}

/// Frozen quasi-linear spring `N_τ(A)` for torque amplitude `torque`.
/// Zero torque maps to zero gain (the `A → 0` limit).
pub fn quasi_linear_spring(
    geom: &NseeGeometry,
    table: &TorqueSampleTable,
    torque: f64,
) -> Result<LinearSpring> {
    if torque == 0.0 {
        return Ok(LinearSpring { stiffness: 0.0 });
    }
    let amplitude = table.invert(geom, torque)?.amplitude;
    Ok(LinearSpring {
        stiffness: df_closed_form(geom, amplitude)?,
    })
}

/// Describing-function surrogate, with the amplitude inversion run against
/// `table`.
pub fn simulate_df_with_table(
    act: &ActuatorParams,
    geom: &NseeGeometry,
    table: &TorqueSampleTable,
    exc: &SineExcitation,
    cfg: &SimConfig,
) -> Result<TimeSeries> {
    let spring = quasi_linear_spring(geom, table, exc.amplitude())?;
    simulate(act, spring, exc, cfg)
}

/// Describing-function surrogate with the default sample table.
pub fn simulate_df_linear(
    act: &ActuatorParams,
    geom: &NseeGeometry,
    exc: &SineExcitation,
    cfg: &SimConfig,
) -> Result<TimeSeries> {
    let table = TorqueSampleTable::with_defaults(geom);
    simulate_df_with_table(act, geom, &table, exc, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_sea::sea_frequency_response;

    fn setup() -> (ActuatorParams, NseeGeometry) {
        (ActuatorParams::reference(), NseeGeometry::reference())
    }

    fn rms_theta_difference(coarse: &TimeSeries, fine: &TimeSeries) -> f64 {
        let ratio = (coarse.dt() / fine.dt()).round() as usize;
        let sum: f64 = coarse
            .samples()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.theta - fine.samples()[i * ratio].theta).powi(2))
            .sum();
        (sum / coarse.len() as f64).sqrt()
    }

    #[test]
    fn rk4_trivial_fields() {
        let start = DeflectionState::new(0.3, -2.0);
        let still = rk4_step(start, 0.0, 0.1, |_, _| Ok::<_, ()>(DeflectionState::default())).unwrap();
        assert_eq!(still, start);

        let drift = rk4_step(start, 0.0, 0.25, |_, s: DeflectionState| {
            Ok::<_, ()>(DeflectionState::new(s.theta_dot, 0.0))
        })
        .unwrap();
        assert_eq!(drift.theta, 0.3 - 2.0 * 0.25);
        assert_eq!(drift.theta_dot, -2.0);
    }

    #[test]
    fn rk4_harmonic_oscillator() {
        let w: f64 = 2.0 * PI * 3.0;
        let period = 2.0 * PI / w;
        let steps = 1000;
        let dt = period / steps as f64;
        let energy = |s: DeflectionState| 0.5 * s.theta_dot * s.theta_dot + 0.5 * w * w * s.theta * s.theta;
        let mut s = DeflectionState::new(1.0, 0.0);
        let e0 = energy(s);
        for i in 0..steps {
            s = rk4_step(s, i as f64 * dt, dt, |_, x: DeflectionState| {
                Ok::<_, ()>(DeflectionState::new(x.theta_dot, -w * w * x.theta))
            })
            .unwrap();
        }
        assert!((energy(s) - e0).abs() / e0 < 1e-8);
        // analytic solution cos(w t) returns to 1 after a period
        assert!((s.theta - 1.0).abs() < 1e-8);
    }

    #[test]
    fn step_plan_rules() {
        let exc = SineExcitation::new(1.0, 2.0).unwrap();
        let plan = SimConfig::default().plan(&exc).unwrap();
        assert_eq!(plan.steps_per_period, 5000);
        assert!((plan.dt - 1e-4).abs() < 1e-18);

        let fast = SineExcitation::new(1.0, 30.0).unwrap();
        let plan = SimConfig::default().plan(&fast).unwrap();
        assert_eq!(plan.steps_per_period, 1000);

        let odd = SineExcitation::new(1.0, 7.0).unwrap();
        let plan = SimConfig::default().plan(&odd).unwrap();
        assert!(plan.dt <= 1e-4);
        assert!((plan.dt * plan.steps_per_period as f64 - odd.period()).abs() < 1e-15);

        let coarse = SimConfig {
            dt: Some(1e-3),
            ..SimConfig::default()
        };
        assert!(matches!(coarse.plan(&exc), Err(Error::StepTooLarge { .. })));
        assert!(SimConfig::with_periods(1).plan(&exc).is_err());
    }

    #[test]
    fn excitation_validation() {
        assert!(SineExcitation::new(-1.0, 1.0).is_err());
        assert!(SineExcitation::new(1.0, 0.0).is_err());
        let exc = SineExcitation::new(2.0, 4.0).unwrap();
        assert_eq!(exc.period(), 0.25);
        assert!((exc.torque_at(exc.period() / 4.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn series_length_contract() {
        let (act, geom) = setup();
        let exc = SineExcitation::new(15.0, 2.0).unwrap();
        let cfg = SimConfig::with_periods(3);
        let ts = simulate_physical(&act, &geom, &exc, &cfg).unwrap();
        assert_eq!(ts.len(), 3 * 5000 + 1);
        assert!(ts.samples().windows(2).all(|w| w[1].t > w[0].t));
        assert!((ts.end_time() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_input_stays_at_rest() {
        let (act, geom) = setup();
        let exc = SineExcitation::new(0.0, 5.0).unwrap();
        let cfg = SimConfig::default();
        for ts in [
            simulate_physical(&act, &geom, &exc, &cfg).unwrap(),
            simulate_df_linear(&act, &geom, &exc, &cfg).unwrap(),
        ] {
            assert!(ts
                .samples()
                .iter()
                .all(|s| s.theta == 0.0 && s.theta_dot == 0.0 && s.tau_hb == 0.0));
        }
    }

    #[test]
    fn linear_spring_low_frequency_gain() {
        let act = ActuatorParams::reference();
        let k = 44.4;
        let exc = SineExcitation::new(1.0, 1.0).unwrap();
        let cfg = SimConfig::with_periods(6);
        let ts = simulate(&act, LinearSpring { stiffness: k }, &exc, &cfg).unwrap();
        let last_period = &ts.samples()[5 * 10_000..];
        let peak = last_period.iter().map(|s| s.tau_hb.abs()).fold(0.0, f64::max);
        let expected = sea_frequency_response(&act, k, exc.omega()).norm();
        assert!((peak - expected).abs() < 0.02);
        assert!((peak - 1.0).abs() < 0.02);
    }

    #[test]
    fn df_path_steady_state_matches_lti() {
        let (act, geom) = setup();
        let table = TorqueSampleTable::with_defaults(&geom);
        let exc = SineExcitation::new(5.0, 6.0).unwrap();
        let cfg = SimConfig::with_periods(20);
        let ts = simulate_df_with_table(&act, &geom, &table, &exc, &cfg).unwrap();
        let k = quasi_linear_spring(&geom, &table, 5.0).unwrap().stiffness;
        let expected = sea_frequency_response(&act, k, exc.omega()).norm() * 5.0;
        let spp = cfg.plan(&exc).unwrap().steps_per_period;
        let peak = ts.samples()[19 * spp..]
            .iter()
            .map(|s| s.tau_hb.abs())
            .fold(0.0, f64::max);
        assert!((peak - expected).abs() / expected < 0.01);
    }

    #[test]
    fn df_stiffness_grows_with_torque() {
        let geom = NseeGeometry::reference();
        let table = TorqueSampleTable::with_defaults(&geom);
        let big = quasi_linear_spring(&geom, &table, 15.0).unwrap().stiffness;
        let small = quasi_linear_spring(&geom, &table, 1.0).unwrap().stiffness;
        assert!(big > small);
    }

    #[test]
    fn df_path_propagates_range_error() {
        let (act, geom) = setup();
        let exc = SineExcitation::new(1e4, 2.0).unwrap();
        assert!(matches!(
            simulate_df_linear(&act, &geom, &exc, &SimConfig::default()),
            Err(Error::TorqueOutOfRange { .. })
        ));
    }

    #[test]
    fn physical_path_rejects_folding() {
        let geom = NseeGeometry::reference();
        let act = ActuatorParams::new(0.005, 0.0).unwrap();
        let exc = SineExcitation::new(0.0, 1.0).unwrap();
        let cfg = SimConfig {
            initial: DeflectionState::new(0.0, 2000.0),
            ..SimConfig::default()
        };
        assert!(matches!(
            simulate_physical(&act, &geom, &exc, &cfg),
            Err(Error::TrajectoryOutOfRange { .. })
        ));
    }

    #[test]
    fn deterministic_reruns() {
        let (act, geom) = setup();
        let exc = SineExcitation::new(9.0, 17.0).unwrap();
        let cfg = SimConfig::default();
        let a = simulate_physical(&act, &geom, &exc, &cfg).unwrap();
        let b = simulate_physical(&act, &geom, &exc, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn free_response_dissipates_energy() {
        let (act, geom) = setup();
        let exc = SineExcitation::new(0.0, 5.0).unwrap();
        let cfg = SimConfig {
            initial: DeflectionState::new(0.6, 0.0),
            periods: 10,
            dt: None,
        };
        let ts = simulate_physical(&act, &geom, &exc, &cfg).unwrap();
        let energy = |s: &Sample| {
            0.5 * act.inertia() * s.theta_dot * s.theta_dot + geom.potential_energy(s.theta).unwrap()
        };
        let e0 = energy(&ts.samples()[0]);
        let mut last = e0;
        for s in ts.samples() {
            let e = energy(s);
            assert!(e <= last + 1e-12 * e0);
            last = e;
        }
        assert!(last < 0.01 * e0);
    }

    #[test]
    fn df_path_scales_linearly() {
        let act = ActuatorParams::reference();
        let spring = LinearSpring { stiffness: 20.0 };
        let cfg = SimConfig::default();
        let base = simulate(&act, spring, &SineExcitation::new(1.5, 9.0).unwrap(), &cfg).unwrap();
        // a power-of-two factor scales every floating operation exactly
        let doubled = simulate(&act, spring, &SineExcitation::new(3.0, 9.0).unwrap(), &cfg).unwrap();
        assert_eq!(doubled, base.scaled(2.0));
        let tripled = simulate(&act, spring, &SineExcitation::new(4.5, 9.0).unwrap(), &cfg).unwrap();
        for (a, b) in tripled.samples().iter().zip(base.scaled(3.0).samples()) {
            assert!((a.theta - b.theta).abs() <= 1e-12 * b.theta.abs().max(1e-3));
            assert!((a.tau_hb - b.tau_hb).abs() <= 1e-12 * b.tau_hb.abs().max(1e-3));
        }
    }

    #[test]
    fn step_halving_converges() {
        let (act, geom) = setup();
        let exc = SineExcitation::new(15.0, 22.0).unwrap();
        let cfg = SimConfig::default();
        let plan = cfg.plan(&exc).unwrap();
        let coarse = simulate_physical(&act, &geom, &exc, &cfg).unwrap();
        let halved = SimConfig {
            dt: Some(plan.dt / 2.0),
            ..cfg
        };
        let fine = simulate_physical(&act, &geom, &exc, &halved).unwrap();
        assert!(rms_theta_difference(&coarse, &fine) < 1e-6);
    }
}
