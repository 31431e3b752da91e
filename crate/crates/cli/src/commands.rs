use std::f64::consts::PI;
use std::io;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use nsea_core::describing::{df_closed_form, df_numeric, TorqueSampleTable, DEFAULT_QUADRATURE_NODES};
use nsea_core::dynamics::{simulate_df_with_table, simulate_physical, SineExcitation};
use nsea_core::freq_response::{compare_zero_crossings, sweep, Model};
use nsea_core::linear_sea::{design_stiffness, zero_db_crossing};
use nsea_core::lpv::{bode_magnitudes, export_schedule, LpvPlant};

use crate::config::{load_config, ConfigError, ExperimentConfig};
use crate::output::{
    ApproximationErrorRow, BodeRow, DfRow, InvertRow, NseeRow, ScheduleRow, SimulationRow, Sink, SweepRow,
    Table2Row,
};

#[derive(Debug, Parser)]
#[command(name = "nsea", version, about = "Nonlinear series elastic actuator analysis")]
pub struct Cli {
    /// JSON experiment config; the built-in reference config when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts (`-` writes CSV to stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps; defaults to available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Print scalar results as JSON objects.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Physical,
    Df,
}

impl From<ModelArg> for Model {
    fn from(arg: ModelArg) -> Self {
        match arg {
            ModelArg::Physical => Model::Physical,
            ModelArg::Df => Model::DescribingFunction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepModelArg {
    Physical,
    Df,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Linear-stiffness design from a saturation frequency and peak torque.
    Design {
        /// Target saturation frequency, Hz.
        #[arg(long, default_value_t = 15.0)]
        saturation_hz: f64,
        /// Required peak torque, N·m.
        #[arg(long, default_value_t = 15.0)]
        tau_max: f64,
    },
    /// Torque and stiffness characteristic of the elastic element.
    Nsee {
        #[arg(long, default_value_t = 2.5)]
        theta_max: f64,
        #[arg(long, default_value_t = 501)]
        points: usize,
        /// Emit the rational-law approximation error instead.
        #[arg(long)]
        error_curve: bool,
    },
    /// Closed-form describing function against its quadrature check.
    Df {
        /// Smallest amplitude as a multiple of √α.
        #[arg(long, default_value_t = 0.01)]
        min_scale: f64,
        /// Largest amplitude as a multiple of √α.
        #[arg(long, default_value_t = 10.0)]
        max_scale: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_NODES)]
        n_quad: usize,
    },
    /// Deflection amplitudes for a list of torque amplitudes.
    Invert {
        /// Comma-separated torque amplitudes, N·m; the config sweep amplitudes when omitted.
        #[arg(long, value_delimiter = ',')]
        torques: Vec<f64>,
    },
    /// Time series of one excitation.
    Simulate {
        #[arg(long, value_enum, default_value_t = ModelArg::Physical)]
        model: ModelArg,
        /// Torque amplitude, N·m.
        #[arg(long)]
        amplitude: f64,
        /// Excitation frequency, Hz.
        #[arg(long)]
        frequency: f64,
        #[arg(long)]
        periods: Option<u32>,
        /// Integration step, s.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// RMS-gain frequency response over an amplitude × frequency grid.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepModelArg::Both)]
        model: SweepModelArg,
        #[arg(long, value_delimiter = ',')]
        amplitudes: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        frequencies: Vec<f64>,
        /// RMS window `[kT, (k+1)T]`; simulation is extended to cover it.
        #[arg(long)]
        window_period: Option<u32>,
    },
    /// Zero-crossing frequencies of both models on the config grid.
    Table2 {
        #[arg(long)]
        window_period: Option<u32>,
    },
    /// Amplitude-scheduled plant: gain schedule and optional Bode grid.
    Lpv {
        /// Comma-separated deflection amplitudes, rad.
        #[arg(long, value_delimiter = ',')]
        amplitudes: Vec<f64>,
        /// Also emit |G(jω, A)| on a frequency grid.
        #[arg(long)]
        bode: bool,
        #[arg(long, default_value_t = 60.0)]
        bode_max_hz: f64,
        #[arg(long, default_value_t = 241)]
        bode_points: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] nsea_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Model(_) => "model",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// One-line JSON rendering for stderr.
    pub fn to_json_line(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::reference(),
    };
    let sink = Sink::new(cli.out.as_deref().unwrap_or(&config.output_dir));
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
    };
    let ctx = Context {
        config,
        sink,
        json: cli.json,
    };
    pool.install(|| ctx.dispatch(&cli.command))
}

struct Context {
    config: ExperimentConfig,
    sink: Sink,
    json: bool,
}

impl Context {
    fn dispatch(&self, command: &Command) -> Result<(), CliError> {
        match command {
            Command::Design {
                saturation_hz,
                tau_max,
            } => self.design(*saturation_hz, *tau_max),
            Command::Nsee {
                theta_max,
                points,
                error_curve,
            } => self.nsee(*theta_max, *points, *error_curve),
            Command::Df {
                min_scale,
                max_scale,
                points,
                n_quad,
            } => self.df(*min_scale, *max_scale, *points, *n_quad),
            Command::Invert { torques } => self.invert(torques),
            Command::Simulate {
                model,
                amplitude,
                frequency,
                periods,
                dt,
            } => self.simulate((*model).into(), *amplitude, *frequency, *periods, *dt),
            Command::Sweep {
                model,
                amplitudes,
                frequencies,
                window_period,
            } => self.sweep(*model, amplitudes, frequencies, *window_period),
            Command::Table2 { window_period } => self.table2(*window_period),
            Command::Lpv {
                amplitudes,
                bode,
                bode_max_hz,
                bode_points,
            } => self.lpv(amplitudes, *bode, *bode_max_hz, *bode_points),
        }
    }

    fn announce(&self, path: Option<PathBuf>) {
        if let Some(path) = path {
            if !self.json {
                eprintln!("wrote {}", path.display());
            }
        }
    }

    fn design(&self, saturation_hz: f64, tau_max: f64) -> Result<(), CliError> {
        let act = &self.config.actuator;
        let spec = design_stiffness(act, 2.0 * PI * saturation_hz, tau_max)?;
        let crossing = zero_db_crossing(act, spec.k_sea);
        let value = json!({
            "k_sea_Nm_per_rad": spec.k_sea,
            "theta_max_rad": spec.theta_max,
            "tau_max_Nm": spec.tau_max,
            "omega_sat_rad_s": spec.omega_sat,
            "zero_db_crossing_rad_s": crossing,
            "zero_db_crossing_Hz": crossing.map(|w| w / (2.0 * PI)),
        });
        println!("{value}");
        let path = self.sink.write_json("design", &value)?;
        self.announce(path);
        Ok(())
    }

    fn nsee(&self, theta_max: f64, points: usize, error_curve: bool) -> Result<(), CliError> {
        if points < 2 || theta_max.is_nan() || theta_max <= 0.0 {
            return Err(CliError::Usage("need --points >= 2 and --theta-max > 0".into()));
        }
        let geom = &self.config.geometry;
        let thetas: Vec<f64> = (0..points)
            .map(|i| theta_max * i as f64 / (points - 1) as f64)
            .collect();
        let path = if error_curve {
            let rows = thetas
                .iter()
                .filter(|&&t| t > 0.0)
                .map(|&theta| {
                    let exact = geom.torque_exact(theta)?;
                    let approx = geom.torque_maclaurin(theta);
                    Ok(ApproximationErrorRow {
                        theta_rad: theta,
                        torque_exact: exact,
                        torque_maclaurin: approx,
                        rel_error: (approx - exact).abs() / exact.abs(),
                    })
                })
                .collect::<nsea_core::Result<Vec<_>>>()?;
            self.sink.write_csv("nsee_error", &rows)?
        } else {
            let rows = thetas
                .iter()
                .map(|&theta| {
                    Ok(NseeRow {
                        theta_rad: theta,
                        torque_exact: geom.torque_exact(theta)?,
                        torque_maclaurin: geom.torque_maclaurin(theta),
                        stiffness_exact: geom.stiffness_exact(theta)?,
                    })
                })
                .collect::<nsea_core::Result<Vec<_>>>()?;
            self.sink.write_csv("nsee", &rows)?
        };
        self.announce(path);
        Ok(())
    }

    fn df(&self, min_scale: f64, max_scale: f64, points: usize, n_quad: usize) -> Result<(), CliError> {
        if points < 2 || !(min_scale > 0.0 && max_scale > min_scale) {
            return Err(CliError::Usage(
                "need --points >= 2 and 0 < --min-scale < --max-scale".into(),
            ));
        }
        let geom = &self.config.geometry;
        let root_alpha = geom.alpha().sqrt();
        let (lo, hi) = (min_scale.log10(), max_scale.log10());
        let rows = (0..points)
            .map(|i| {
                let exponent = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                let amplitude = root_alpha * 10f64.powf(exponent);
                let closed = df_closed_form(geom, amplitude)?;
                let numeric = df_numeric(geom, amplitude, n_quad)?.gain;
                Ok(DfRow {
                    amplitude,
                    closed,
                    numeric,
                    rel_err: (closed - numeric).abs() / numeric.abs(),
                })
            })
            .collect::<nsea_core::Result<Vec<_>>>()?;
        let path = self.sink.write_csv("df", &rows)?;
        self.announce(path);
        Ok(())
    }

    fn invert(&self, torques: &[f64]) -> Result<(), CliError> {
        let geom = &self.config.geometry;
        let table = TorqueSampleTable::with_defaults(geom);
        let torques = if torques.is_empty() {
            &self.config.amplitudes[..]
        } else {
            torques
        };
        let rows = torques
            .iter()
            .map(|&torque| {
                let inv = table.invert(geom, torque)?;
                Ok(InvertRow {
                    torque,
                    amplitude: inv.amplitude,
                    n_tau: df_closed_form(geom, inv.amplitude)?,
                    iterations: inv.iterations,
                })
            })
            .collect::<nsea_core::Result<Vec<_>>>()?;
        if self.json {
            let value = json!(rows
                .iter()
                .map(|r| json!({
                    "torque_Nm": r.torque,
                    "A_rad": r.amplitude,
                    "N_tau": r.n_tau,
                    "iterations": r.iterations,
                }))
                .collect::<Vec<_>>());
            println!("{value}");
        }
        let path = self.sink.write_csv("invert", &rows)?;
        self.announce(path);
        Ok(())
    }

    fn simulate(
        &self,
        model: Model,
        amplitude: f64,
        frequency: f64,
        periods: Option<u32>,
        dt: Option<f64>,
    ) -> Result<(), CliError> {
        let cfg = &self.config;
        let mut sim = cfg.sweep.sim;
        if let Some(p) = periods {
            sim.periods = p;
        }
        if dt.is_some() {
            sim.dt = dt;
        }
        let exc = SineExcitation::new(amplitude, frequency)?;
        let ts = match model {
            Model::Physical => simulate_physical(&cfg.actuator, &cfg.geometry, &exc, &sim)?,
            Model::DescribingFunction => {
                let table = TorqueSampleTable::with_defaults(&cfg.geometry);
                simulate_df_with_table(&cfg.actuator, &cfg.geometry, &table, &exc, &sim)?
            }
        };
        let rows: Vec<SimulationRow> = ts
            .samples()
            .iter()
            .map(|s| SimulationRow {
                t_s: s.t,
                theta_rad: s.theta,
                theta_dot_rad_s: s.theta_dot,
                tau_act: s.tau_act,
                tau_hb: s.tau_hb,
            })
            .collect();
        let name = format!("simulate_{model}_{amplitude}Nm_{frequency}Hz");
        let path = self.sink.write_csv(&name, &rows)?;
        self.announce(path);
        Ok(())
    }

    fn sweep_settings(&self, window_period: Option<u32>) -> nsea_core::freq_response::SweepSettings {
        let mut settings = self.config.sweep;
        if let Some(k) = window_period {
            settings.window_period = k;
            settings.sim.periods = settings.sim.periods.max(k + 1);
        }
        settings
    }

    fn sweep(
        &self,
        model: SweepModelArg,
        amplitudes: &[f64],
        frequencies: &[f64],
        window_period: Option<u32>,
    ) -> Result<(), CliError> {
        let cfg = &self.config;
        let amplitudes = if amplitudes.is_empty() { &cfg.amplitudes[..] } else { amplitudes };
        let frequencies = if frequencies.is_empty() { &cfg.frequencies[..] } else { frequencies };
        let settings = self.sweep_settings(window_period);
        let models: &[Model] = match model {
            SweepModelArg::Physical => &[Model::Physical],
            SweepModelArg::Df => &[Model::DescribingFunction],
            SweepModelArg::Both => &[Model::Physical, Model::DescribingFunction],
        };
        let mut rows = Vec::new();
        for &m in models {
            let grid = sweep(&cfg.actuator, &cfg.geometry, m, amplitudes, frequencies, &settings)?;
            rows.extend(grid.points().map(|p| SweepRow {
                amplitude: p.amplitude,
                frequency: p.frequency,
                gain: p.gain,
                gain_db: p.gain_db(),
                model: m.to_string(),
            }));
        }
        let path = self.sink.write_csv("sweep", &rows)?;
        self.announce(path);
        Ok(())
    }

    fn table2(&self, window_period: Option<u32>) -> Result<(), CliError> {
        let cfg = &self.config;
        let settings = self.sweep_settings(window_period);
        let physical = sweep(
            &cfg.actuator,
            &cfg.geometry,
            Model::Physical,
            &cfg.amplitudes,
            &cfg.frequencies,
            &settings,
        )?;
        let df = sweep(
            &cfg.actuator,
            &cfg.geometry,
            Model::DescribingFunction,
            &cfg.amplitudes,
            &cfg.frequencies,
            &settings,
        )?;
        let comparison = compare_zero_crossings(&physical, &df)?;
        let rows: Vec<Table2Row> = comparison
            .iter()
            .map(|c| Table2Row {
                amplitude: c.amplitude,
                physical: c.physical,
                df: c.describing_function,
                diff: c.difference(),
            })
            .collect();

        if self.json {
            let value = json!(rows
                .iter()
                .map(|r| json!({
                    "amplitude_Nm": r.amplitude,
                    "f_zc_physical_Hz": r.physical,
                    "f_zc_df_Hz": r.df,
                    "diff_Hz": r.diff,
                }))
                .collect::<Vec<_>>());
            println!("{value}");
        } else if !self.sink.is_stdout() {
            print!("{}", aligned_table(&rows));
        }
        let path = self.sink.write_csv("table2", &rows)?;
        self.announce(path);
        Ok(())
    }

    fn lpv(&self, amplitudes: &[f64], bode: bool, bode_max_hz: f64, bode_points: usize) -> Result<(), CliError> {
        let cfg = &self.config;
        let plant = LpvPlant::new(cfg.lpv_gain, cfg.actuator, cfg.geometry)?;
        let amplitudes: Vec<f64> = if amplitudes.is_empty() {
            (1..=40).map(|i| 0.025 * f64::from(i)).collect()
        } else {
            amplitudes.to_vec()
        };
        let rows: Vec<ScheduleRow> = export_schedule(&plant, &amplitudes)?
            .into_iter()
            .map(|e| ScheduleRow {
                amplitude: e.amplitude,
                n_tau: e.n_tau,
                natural_frequency: e.natural_frequency_hz,
                damping_ratio: e.damping_ratio,
            })
            .collect();
        let path = self.sink.write_csv("lpv_schedule", &rows)?;
        self.announce(path);

        if bode {
            if bode_points < 2 || bode_max_hz.is_nan() || bode_max_hz <= 0.0 {
                return Err(CliError::Usage("need --bode-points >= 2 and --bode-max-hz > 0".into()));
            }
            let omegas: Vec<f64> = (0..bode_points)
                .map(|i| 2.0 * PI * bode_max_hz * i as f64 / (bode_points - 1) as f64)
                .collect();
            let mags = bode_magnitudes(&plant, &amplitudes, &omegas)?;
            let rows: Vec<BodeRow> = amplitudes
                .iter()
                .zip(&mags)
                .flat_map(|(&a, row)| {
                    omegas.iter().zip(row).map(move |(&w, &m)| BodeRow {
                        amplitude: a,
                        omega_rad_s: w,
                        magnitude: m,
                        magnitude_db: 20.0 * m.log10(),
                    })
                })
                .collect();
            let path = self.sink.write_csv("lpv_bode", &rows)?;
            self.announce(path);
        }
        Ok(())
    }
}

fn aligned_table(rows: &[Table2Row]) -> String {
    let mut out = String::from("zero-crossing frequency [Hz]\n");
    out.push_str(&format!("{:<16}", "amplitude [Nm]"));
    for r in rows {
        out.push_str(&format!("{:>7}", format!("±{}", r.amplitude)));
    }
    out.push('\n');
    for (label, pick) in [
        ("physical", (|r: &Table2Row| r.physical) as fn(&Table2Row) -> f64),
        ("describing fn", |r: &Table2Row| r.df),
        ("difference", |r: &Table2Row| r.diff),
    ] {
        out.push_str(&format!("{label:<16}"));
        for r in rows {
            out.push_str(&format!("{:>7}", pick(r)));
        }
        out.push('\n');
    }
    out
}
