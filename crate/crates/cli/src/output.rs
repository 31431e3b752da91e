//! CSV record layouts. Column names and order are part of the tool's
//! interface; downstream plotting scripts depend on them.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct NseeRow {
    pub theta_rad: f64,
    #[serde(rename = "torque_exact_Nm")]
    pub torque_exact: f64,
    #[serde(rename = "torque_maclaurin_Nm")]
    pub torque_maclaurin: f64,
    #[serde(rename = "stiffness_exact_Nm_per_rad")]
    pub stiffness_exact: f64,
}

#[derive(Debug, Serialize)]
pub struct ApproximationErrorRow {
    pub theta_rad: f64,
    #[serde(rename = "torque_exact_Nm")]
    pub torque_exact: f64,
    #[serde(rename = "torque_maclaurin_Nm")]
    pub torque_maclaurin: f64,
    pub rel_error: f64,
}

#[derive(Debug, Serialize)]
pub struct DfRow {
    #[serde(rename = "A_rad")]
    pub amplitude: f64,
    #[serde(rename = "N_tau_closed")]
    pub closed: f64,
    #[serde(rename = "N_tau_numeric")]
    pub numeric: f64,
    pub rel_err: f64,
}

#[derive(Debug, Serialize)]
pub struct InvertRow {
    #[serde(rename = "torque_Nm")]
    pub torque: f64,
    #[serde(rename = "A_rad")]
    pub amplitude: f64,
    #[serde(rename = "N_tau")]
    pub n_tau: f64,
    pub iterations: usize,
}

#[derive(Debug, Serialize)]
pub struct SimulationRow {
    pub t_s: f64,
    pub theta_rad: f64,
    pub theta_dot_rad_s: f64,
    #[serde(rename = "tau_act_Nm")]
    pub tau_act: f64,
    #[serde(rename = "tau_hb_Nm")]
    pub tau_hb: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "amplitude_Nm")]
    pub amplitude: f64,
    #[serde(rename = "frequency_Hz")]
    pub frequency: f64,
    pub gain: f64,
    #[serde(rename = "gain_dB")]
    pub gain_db: f64,
    pub model: String,
}

#[derive(Debug, Serialize)]
pub struct Table2Row {
    #[serde(rename = "amplitude_Nm")]
    pub amplitude: f64,
    #[serde(rename = "f_zc_physical_Hz")]
    pub physical: f64,
    #[serde(rename = "f_zc_df_Hz")]
    pub df: f64,
    #[serde(rename = "diff_Hz")]
    pub diff: f64,
}

#[derive(Debug, Serialize)]
pub struct ScheduleRow {
    #[serde(rename = "A_rad")]
    pub amplitude: f64,
    #[serde(rename = "N_tau_Nm_per_rad")]
    pub n_tau: f64,
    #[serde(rename = "natural_frequency_Hz")]
    pub natural_frequency: f64,
    pub damping_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct BodeRow {
    #[serde(rename = "A_rad")]
    pub amplitude: f64,
    pub omega_rad_s: f64,
    pub magnitude: f64,
    #[serde(rename = "magnitude_dB")]
    pub magnitude_db: f64,
}

/// Where tabular output goes: a named file under the output directory, or
/// standard output when the directory is `-`.
#[derive(Debug, Clone)]
pub enum Sink {
    Stdout,
    Directory(PathBuf),
}

impl Sink {
    pub fn new(dir: &Path) -> Self {
        if dir == Path::new("-") {
            Sink::Stdout
        } else {
            Sink::Directory(dir.to_path_buf())
        }
    }

    pub fn is_stdout(&self) -> bool {
        matches!(self, Sink::Stdout)
    }

    /// Writes `rows` as CSV; returns the file path when one was written.
    pub fn write_csv<R: Serialize>(&self, name: &str, rows: &[R]) -> io::Result<Option<PathBuf>> {
        match self {
            Sink::Stdout => {
                write_rows(io::stdout().lock(), rows)?;
                Ok(None)
            }
            Sink::Directory(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{name}.csv"));
                write_rows(File::create(&path)?, rows)?;
                Ok(Some(path))
            }
        }
    }

    pub fn write_json(&self, name: &str, value: &serde_json::Value) -> io::Result<Option<PathBuf>> {
        match self {
            Sink::Stdout => Ok(None),
            Sink::Directory(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{name}.json"));
                let mut file = File::create(&path)?;
                serde_json::to_writer_pretty(&mut file, value)?;
                writeln!(file)?;
                Ok(Some(path))
            }
        }
    }
}

pub fn write_rows<W: Write, R: Serialize>(writer: W, rows: &[R]) -> io::Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row).map_err(io::Error::other)?;
    }
    csv.flush()
}
