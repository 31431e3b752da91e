//! Experiment configuration.
//!
//! The file mirrors how the actuator parameters are usually tabulated:
//! spring stiffness in N/mm and radii in mm. Everything is converted to SI
//! exactly once, in [`ExperimentConfig::from_file_config`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use nsea_core::dynamics::SimConfig;
use nsea_core::freq_response::{default_frequencies, SweepSettings, DEFAULT_AMPLITUDES};
use nsea_core::linear_sea::ActuatorParams;
use nsea_core::nsee::{DeflectionState, NseeGeometry};

/// The reference configuration shipped with the tool.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/table1.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorSection {
    #[serde(rename = "J_act", default = "default_inertia")]
    pub inertia: f64,
    #[serde(rename = "D_act", default = "default_damping")]
    pub damping: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NseeSection {
    #[serde(default = "default_springs")]
    pub n: u32,
    #[serde(rename = "k_s_N_per_mm", default = "default_spring_stiffness")]
    pub spring_stiffness_n_per_mm: f64,
    #[serde(rename = "R_mm", default = "default_outer")]
    pub outer_radius_mm: f64,
    #[serde(rename = "r_mm", default = "default_inner")]
    pub inner_radius_mm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// Seconds; unset means `min(1e-4, T/1000)` per frequency.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_periods")]
    pub periods: u32,
    #[serde(default = "default_window_period")]
    pub window_period: u32,
    #[serde(default)]
    pub initial_theta: f64,
    #[serde(default)]
    pub initial_theta_dot: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(rename = "amplitudes_Nm", default = "default_amplitudes")]
    pub amplitudes: Vec<f64>,
    #[serde(rename = "frequencies_Hz", default = "default_frequencies")]
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpvSection {
    #[serde(rename = "K", default = "default_lpv_gain")]
    pub gain: f64,
}

/// On-disk layout, before unit conversion and validation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default = "ActuatorSection::default")]
    pub actuator: ActuatorSection,
    #[serde(default = "NseeSection::default")]
    pub nsee: NseeSection,
    #[serde(default = "SimulationSection::default")]
    pub simulation: SimulationSection,
    #[serde(default = "SweepSection::default")]
    pub sweep: SweepSection,
    #[serde(default = "LpvSection::default")]
    pub lpv: LpvSection,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_inertia() -> f64 {
    0.005
}
fn default_damping() -> f64 {
    0.1
}
fn default_springs() -> u32 {
    4
}
fn default_spring_stiffness() -> f64 {
    32.0
}
fn default_outer() -> f64 {
    70.0
}
fn default_inner() -> f64 {
    40.0
}
fn default_periods() -> u32 {
    2
}
fn default_window_period() -> u32 {
    1
}
fn default_amplitudes() -> Vec<f64> {
    DEFAULT_AMPLITUDES.to_vec()
}
fn default_lpv_gain() -> f64 {
    1.0
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ActuatorSection {
    fn default() -> Self {
        Self {
            inertia: default_inertia(),
            damping: default_damping(),
        }
    }
}

impl Default for NseeSection {
    fn default() -> Self {
        Self {
            n: default_springs(),
            spring_stiffness_n_per_mm: default_spring_stiffness(),
            outer_radius_mm: default_outer(),
            inner_radius_mm: default_inner(),
        }
    }
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            dt: None,
            periods: default_periods(),
            window_period: default_window_period(),
            initial_theta: 0.0,
            initial_theta_dot: 0.0,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            amplitudes: default_amplitudes(),
            frequencies: default_frequencies(),
        }
    }
}

impl Default for LpvSection {
    fn default() -> Self {
        Self {
            gain: default_lpv_gain(),
        }
    }
}

/// Validated configuration in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub actuator: ActuatorParams,
    pub geometry: NseeGeometry,
    pub sweep: SweepSettings,
    pub amplitudes: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub lpv_gain: f64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let file: FileConfig = serde_json::from_str(text).map_err(|err| ConfigError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        })?;
        Self::from_file_config(file)
    }

    pub fn reference() -> Self {
        Self::from_json(DEFAULT_CONFIG).expect("shipped config is valid")
    }

    pub fn from_file_config(file: FileConfig) -> Result<Self, ConfigError> {
        let actuator = ActuatorParams::new(file.actuator.inertia, file.actuator.damping)
            .map_err(|e| invalid(&e, "actuator"))?;

        let nsee = &file.nsee;
        let geometry = NseeGeometry::new(
            nsee.n,
            nsee.spring_stiffness_n_per_mm * 1e3,
            nsee.outer_radius_mm * 1e-3,
            nsee.inner_radius_mm * 1e-3,
        )
        .map_err(|e| invalid(&e, "nsee"))?;

        let sim = &file.simulation;
        if let Some(dt) = sim.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(ConfigError::Invalid {
                    key: "simulation.dt".into(),
                    reason: "step must be positive".into(),
                });
            }
        }
        if sim.periods < 2 {
            return Err(ConfigError::Invalid {
                key: "simulation.periods".into(),
                reason: "need at least two periods".into(),
            });
        }
        if sim.periods < sim.window_period + 1 {
            return Err(ConfigError::Invalid {
                key: "simulation.window_period".into(),
                reason: format!(
                    "window [{0}T, {1}T] ends after the {2} simulated periods",
                    sim.window_period,
                    sim.window_period + 1,
                    sim.periods
                ),
            });
        }
        let sweep = SweepSettings {
            sim: SimConfig {
                dt: sim.dt,
                periods: sim.periods,
                initial: DeflectionState::new(sim.initial_theta, sim.initial_theta_dot),
            },
            window_period: sim.window_period,
        };

        check_axis("sweep.amplitudes_Nm", &file.sweep.amplitudes)?;
        check_axis("sweep.frequencies_Hz", &file.sweep.frequencies)?;
        if !(file.lpv.gain.is_finite() && file.lpv.gain > 0.0) {
            return Err(ConfigError::Invalid {
                key: "lpv.K".into(),
                reason: "plant gain must be positive".into(),
            });
        }

        Ok(Self {
            actuator,
            geometry,
            sweep,
            amplitudes: file.sweep.amplitudes,
            frequencies: file.sweep.frequencies,
            lpv_gain: file.lpv.gain,
            output_dir: file.output_dir,
        })
    }
}

/// Reads and validates a JSON config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::from_json(&text)
}

fn check_axis(key: &str, values: &[f64]) -> Result<(), ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::Invalid {
            key: key.into(),
            reason: "must not be empty".into(),
        });
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(ConfigError::Invalid {
            key: key.into(),
            reason: format!("value {v} is not positive"),
        });
    }
    Ok(())
}

fn invalid(err: &nsea_core::Error, section: &str) -> ConfigError {
    match err {
        nsea_core::Error::InvalidParameter { name, reason } => {
            let key = match *name {
                "k_s" => "k_s_N_per_mm",
                "R" => "R_mm",
                "r" => "r_mm",
                other => other,
            };
            ConfigError::Invalid {
                key: format!("{section}.{key}"),
                reason: reason.clone(),
            }
        }
        other => ConfigError::Invalid {
            key: section.into(),
            reason: other.to_string(),
        },
    }
}
