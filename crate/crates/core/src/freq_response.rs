//! RMS-gain frequency response and 0 dB crossing extraction.
//!
//! Because the nonlinear actuator produces superharmonics, gain is measured
//! as a ratio of RMS values over one input period rather than from the
//! fundamental alone:
//!
//! ```text
//! G = √(∫ τ_hb² dt) / √(∫ τ_act² dt)      over [T, 2T]
//! ```
//!
//! Sweep cells are independent simulations and run on the rayon pool of the
//! caller; results are assembled in (amplitude, frequency) order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::describing::TorqueSampleTable;
use crate::dynamics::{simulate, simulate_df_with_table, ExactSpring, SimConfig, SineExcitation, TimeSeries};
use crate::linear_sea::ActuatorParams;
use crate::nsee::NseeGeometry;
use crate::{Error, Result};

/// Torque amplitudes (N·m) of the reference comparison.
pub const DEFAULT_AMPLITUDES: [f64; 8] = [1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0];

/// 1..=30 Hz in 1 Hz steps.
pub fn default_frequencies() -> Vec<f64> {
    (1..=30).map(f64::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Exact nonlinear spring.
    Physical,
    /// Frozen describing-function gain.
    DescribingFunction,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Physical => "physical",
            Model::DescribingFunction => "df",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "physical" => Ok(Model::Physical),
            "df" => Ok(Model::DescribingFunction),
            other => Err(Error::invalid(
                "model",
                format!("expected `physical` or `df`, got `{other}`"),
            )),
        }
    }
}

/// Simulation settings plus which period the RMS window covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub sim: SimConfig,
    /// Window is `[k T, (k + 1) T]`; the default `k = 1` gives `[T, 2T]`.
    pub window_period: u32,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            window_period: 1,
        }
    }
}

impl SweepSettings {
    /// Simulates just long enough for the window to close.
    pub fn with_window(window_period: u32) -> Self {
        Self {
            sim: SimConfig::with_periods((window_period + 1).max(2)),
            window_period,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sim.periods < self.window_period + 1 {
            return Err(Error::invalid(
                "periods",
                format!(
                    "{} periods do not reach the end of window period {}",
                    self.sim.periods, self.window_period
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqResponsePoint {
    /// N·m
    pub amplitude: f64,
    /// Hz
    pub frequency: f64,
    pub gain: f64,
}

impl FreqResponsePoint {
    pub fn gain_db(&self) -> f64 {
        20.0 * self.gain.log10()
    }
}

/// Gains on an (amplitude × frequency) grid, both axes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqResponseGrid {
    pub model: Model,
    amplitudes: Vec<f64>,
    frequencies: Vec<f64>,
    rows: Vec<Vec<FreqResponsePoint>>,
    zero_crossings: Vec<Option<f64>>,
}

impl FreqResponseGrid {
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn rows(&self) -> &[Vec<FreqResponsePoint>] {
        &self.rows
    }

    pub fn points(&self) -> impl Iterator<Item = &FreqResponsePoint> {
        self.rows.iter().flatten()
    }

    /// Row for an amplitude present on the grid.
    pub fn row_for(&self, amplitude: f64) -> Option<&[FreqResponsePoint]> {
        self.amplitudes
            .iter()
            .position(|&a| a == amplitude)
            .map(|i| self.rows[i].as_slice())
    }

    /// Per-row crossing; `None` where the row has no well-defined crossing.
    pub fn zero_crossings(&self) -> &[Option<f64>] {
        &self.zero_crossings
    }

    pub fn zero_crossing(&self, row: usize) -> Result<f64> {
        zero_crossing_frequency(&self.rows[row])
    }
}

/// `√(∫ τ_hb²) / √(∫ τ_act²)` over `[T, 2T]` by the trapezoid rule.
pub fn rms_gain(ts: &TimeSeries, period: f64) -> Result<f64> {
    rms_gain_over(ts, period, 1)
}

/// RMS gain over the window `[k T, (k + 1) T]`.
pub fn rms_gain_over(ts: &TimeSeries, period: f64, window_period: u32) -> Result<f64> {
    let dt = ts.dt();
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::invalid("T", "period must be positive"));
    }
    let steps = (period / dt).round() as usize;
    if steps == 0 || (steps as f64 * dt - period).abs() > 1e-9 * period {
        return Err(Error::PeriodMismatch { dt, period });
    }
    let start = steps * window_period as usize;
    let end = start + steps;
    if end >= ts.len() {
        return Err(Error::WindowTooShort {
            len: ts.len(),
            start: f64::from(window_period) * period,
            end: f64::from(window_period + 1) * period,
        });
    }
    let window = &ts.samples()[start..=end];
    let trapezoid = |value: fn(&crate::dynamics::Sample) -> f64| {
        let interior: f64 = window[1..steps].iter().map(|s| value(s).powi(2)).sum();
        let ends = 0.5 * (value(&window[0]).powi(2) + value(&window[steps]).powi(2));
        (interior + ends) * dt
    };
    let output = trapezoid(|s| s.tau_hb);
    let input = trapezoid(|s| s.tau_act);
    if input <= 0.0 {
        return Err(Error::invalid("tau_act", "input torque has zero RMS over the window"));
    }
    Ok((output / input).sqrt())
}

/// Largest grid frequency with `G ≥ 1` such that every higher grid
/// frequency has `G < 1`. Reported at grid resolution.
pub fn zero_crossing_frequency(row: &[FreqResponsePoint]) -> Result<f64> {
    let last_above = row
        .iter()
        .rposition(|p| p.gain >= 1.0)
        .ok_or(Error::NoZeroCrossing {
            reason: "gain is below 0 dB across the whole row",
        })?;
    if last_above == row.len() - 1 {
        return Err(Error::NoZeroCrossing {
            reason: "gain is still at or above 0 dB at the top of the grid",
        });
    }
    Ok(row[last_above].frequency)
}

fn sorted_axis(name: &'static str, values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid(name, "grid axis is empty"));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::invalid(name, format!("grid value {bad} is not positive")));
    }
    let mut axis = values.to_vec();
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    Ok(axis)
}

struct CellRunner<'a> {
    act: &'a ActuatorParams,
    geom: &'a NseeGeometry,
    table: Option<TorqueSampleTable>,
    settings: &'a SweepSettings,
}

impl CellRunner<'_> {
    fn series(&self, exc: &SineExcitation) -> Result<TimeSeries> {
        match &self.table {
            None => simulate(self.act, ExactSpring(*self.geom), exc, &self.settings.sim),
            Some(table) => simulate_df_with_table(self.act, self.geom, table, exc, &self.settings.sim),
        }
    }

    fn gain(&self, amplitude: f64, frequency: f64) -> Result<f64> {
        let exc = SineExcitation::new(amplitude, frequency)?;
        let ts = self.series(&exc)?;
        rms_gain_over(&ts, exc.period(), self.settings.window_period)
    }
}

/// One simulation and RMS gain per (amplitude, frequency) cell.
pub fn sweep(
    act: &ActuatorParams,
    geom: &NseeGeometry,
    model: Model,
    amplitudes: &[f64],
    frequencies: &[f64],
    settings: &SweepSettings,
) -> Result<FreqResponseGrid> {
    settings.validate()?;
    let amplitudes = sorted_axis("amplitudes", amplitudes)?;
    let frequencies = sorted_axis("frequencies", frequencies)?;
    let runner = CellRunner {
        act,
        geom,
        table: match model {
            Model::Physical => None,
            Model::DescribingFunction => Some(TorqueSampleTable::with_defaults(geom)),
        },
        settings,
    };

    let cells: Vec<(f64, f64)> = amplitudes
        .iter()
        .flat_map(|&a| frequencies.iter().map(move |&f| (a, f)))
        .collect();
    let gains: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(a, f)| runner.gain(a, f))
        .collect();

    let mut rows = Vec::with_capacity(amplitudes.len());
    let mut results = cells.iter().zip(gains);
    for _ in &amplitudes {
        let mut row = Vec::with_capacity(frequencies.len());
        for (&(amplitude, frequency), gain) in results.by_ref().take(frequencies.len()) {
            let gain = gain.map_err(|source| Error::SweepCell {
                amplitude,
                frequency,
                source: Box::new(source),
            })?;
            row.push(FreqResponsePoint {
                amplitude,
                frequency,
                gain,
            });
        }
        rows.push(row);
    }
    let zero_crossings = rows
        .iter()
        .map(|row| zero_crossing_frequency(row).ok())
        .collect();
    Ok(FreqResponseGrid {
        model,
        amplitudes,
        frequencies,
        rows,
        zero_crossings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossingComparison {
    /// N·m
    pub amplitude: f64,
    /// Hz
    pub physical: f64,
    /// Hz
    pub describing_function: f64,
}

impl ZeroCrossingComparison {
    /// `physical − describing_function`, Hz.
    pub fn difference(&self) -> f64 {
        self.physical - self.describing_function
    }
}

/// Pairs the per-amplitude crossings of two grids with the same axes.
pub fn compare_zero_crossings(
    physical: &FreqResponseGrid,
    df: &FreqResponseGrid,
) -> Result<Vec<ZeroCrossingComparison>> {
    if physical.amplitudes() != df.amplitudes() || physical.frequencies() != df.frequencies() {
        return Err(Error::invalid("grid", "physical and df grids have different axes"));
    }
    physical
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &amplitude)| {
            Ok(ZeroCrossingComparison {
                amplitude,
                physical: physical.zero_crossing(i)?,
                describing_function: df.zero_crossing(i)?,
            })
        })
        .collect()
}

/// Both model sweeps on the default grid and their crossing comparison.
pub fn table2(
    act: &ActuatorParams,
    geom: &NseeGeometry,
    settings: &SweepSettings,
) -> Result<Vec<ZeroCrossingComparison>> {
    let frequencies = default_frequencies();
    let physical = sweep(act, geom, Model::Physical, &DEFAULT_AMPLITUDES, &frequencies, settings)?;
    let df = sweep(
        act,
        geom,
        Model::DescribingFunction,
        &DEFAULT_AMPLITUDES,
        &frequencies,
        settings,
    )?;
    compare_zero_crossings(&physical, &df)
}
