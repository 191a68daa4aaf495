//! Batch front end for the rigid-body observer: simulations, verification
//! suites and gain sweeps driven by a TOML config.
//!
//! Exit codes: 0 success, 1 I/O, 2 config, 3 numeric, 4 verification.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub mod config;
pub mod plot;
pub mod sweep;

pub use config::{Config, NoiseMode};
use invobs_core::simulation::{metrics, simulate, MetricsError, MetricsSummary, SimError};
use invobs_core::suite::run_suite;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } => 1,
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
            Self::Verification(_) => 4,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NonFinite { .. } => Self::Numeric(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "invobs",
    version,
    about = "Symmetry-preserving rigid-body velocity observer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate plant and observer; write trajectory, metrics and plot.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the registered invariance checks.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Replace the moving frame with a non-equivariant one.
        #[arg(long)]
        inject_bad_frame: bool,
    },
    /// Run a grid of gains and noise levels.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Scalar gains k for L = kI, comma separated.
        #[arg(long, value_delimiter = ',')]
        gains: Option<Vec<f64>>,
        /// Noise PSD multipliers, comma separated.
        #[arg(long, value_delimiter = ',')]
        noise_scales: Option<Vec<f64>>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if needed.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub noise: Option<NoiseMode>,
    /// Integrator step [s].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time [s].
    #[arg(long)]
    pub t_end: Option<f64>,
    /// level, sinusoid or doublet.
    #[arg(long)]
    pub profile: Option<String>,
}

impl RunArgs {
    fn apply(&self, config: &mut Config) {
        if let Some(mode) = self.noise {
            config.noise.mode = mode;
        }
        if let Some(dt) = self.dt {
            config.sim.dt = dt;
        }
        if let Some(t_end) = self.t_end {
            config.sim.t_end = t_end;
        }
        if let Some(kind) = &self.profile {
            if *kind != config.profile.kind {
                // Parameters from the config belong to the old kind.
                config.profile = config::ProfileSection {
                    kind: kind.clone(),
                    ..config::ProfileSection::default()
                };
            }
        }
    }
}

/// Record of one CLI invocation, written as `manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub config: Config,
    pub out_dir: String,
    pub seed: u64,
    pub artifacts: Vec<String>,
    pub passed: bool,
    pub summary: String,
}

pub const MANIFEST: &str = "manifest.json";
pub const TRAJECTORY: &str = "trajectory.csv";
pub const METRICS: &str = "metrics.json";
pub const PLOT: &str = "velocity.svg";
pub const VERIFICATION: &str = "verification.csv";
pub const SWEEP: &str = "sweep.csv";

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    write(dir, MANIFEST, &text)
}

fn load(common: &CommonArgs) -> Result<Config, CliError> {
    Config::load(common.config.as_deref())
}

/// Metrics summary as written to `metrics.json`.
#[derive(Debug, Serialize)]
pub struct MetricsReport {
    pub rmse: [f64; 3],
    pub rmse_norm: f64,
    pub decay_rate: Option<f64>,
    pub max_eta_after_transient: f64,
    pub window_samples: usize,
}

impl From<&MetricsSummary> for MetricsReport {
    fn from(m: &MetricsSummary) -> Self {
        Self {
            rmse: m.rmse.into(),
            rmse_norm: m.rmse_norm,
            decay_rate: m.decay_rate,
            max_eta_after_transient: m.max_eta_after_transient,
            window_samples: m.window_samples,
        }
    }
}

fn metrics_error(e: MetricsError) -> CliError {
    CliError::Config(format!("{e}; adjust [metrics] window_start/window_end"))
}

pub fn cmd_simulate(common: &CommonArgs, run: &RunArgs) -> Result<String, CliError> {
    let mut config = load(common)?;
    run.apply(&mut config);
    if let Some(seed) = common.seed {
        config.sim.seed = seed;
    }
    let sim = config.sim_config()?;
    let options = config.metrics.options();
    let record = simulate(&sim)?;
    let summary = metrics(&record, &options).map_err(metrics_error)?;

    prepare_out(&common.out)?;
    write(&common.out, TRAJECTORY, &record.to_csv())?;
    let mut metrics_text =
        serde_json::to_string_pretty(&MetricsReport::from(&summary)).expect("metrics serialize");
    metrics_text.push('\n');
    write(&common.out, METRICS, &metrics_text)?;
    write(&common.out, PLOT, &plot::velocity_svg(&record))?;

    let decay = summary
        .decay_rate
        .map_or_else(|| "n/a".to_string(), |r| format!("{r:.4} 1/s"));
    let message = format!(
        "{} samples; decay rate {decay}; velocity RMSE {:.3e} m/s",
        record.len(),
        summary.rmse_norm
    );
    write_manifest(
        &common.out,
        &RunManifest {
            command: "simulate".into(),
            config_path: common.config.as_ref().map(|p| p.display().to_string()),
            seed: config.sim.seed,
            config,
            out_dir: common.out.display().to_string(),
            artifacts: vec![
                TRAJECTORY.into(),
                METRICS.into(),
                PLOT.into(),
                MANIFEST.into(),
            ],
            passed: true,
            summary: message.clone(),
        },
    )?;
    Ok(message)
}

pub fn cmd_verify(common: &CommonArgs, inject_bad_frame: bool) -> Result<String, CliError> {
    let mut config = load(common)?;
    if let Some(seed) = common.seed {
        config.verify.seed = seed;
    }
    config.verify.inject_bad_frame |= inject_bad_frame;
    let gains = config.gains()?;
    let report = run_suite(&gains, &config.verify);

    prepare_out(&common.out)?;
    write(&common.out, VERIFICATION, &report.to_csv())?;
    let failure = report.first_failure().map(|c| {
        format!(
            "{} (max residual {:.3e} > tolerance {:.1e})",
            c.name, c.max_residual, c.tolerance
        )
    });
    let message = match &failure {
        Some(f) => f.clone(),
        None => format!("all {} checks passed", report.checks.len()),
    };
    write_manifest(
        &common.out,
        &RunManifest {
            command: "verify".into(),
            config_path: common.config.as_ref().map(|p| p.display().to_string()),
            seed: config.verify.seed,
            config,
            out_dir: common.out.display().to_string(),
            artifacts: vec![VERIFICATION.into(), MANIFEST.into()],
            passed: failure.is_none(),
            summary: message.clone(),
        },
    )?;
    match failure {
        Some(f) => Err(CliError::Verification(f)),
        None => Ok(message),
    }
}

pub fn cmd_sweep(
    common: &CommonArgs,
    run: &RunArgs,
    gains: Option<&[f64]>,
    noise_scales: Option<&[f64]>,
) -> Result<String, CliError> {
    let mut config = load(common)?;
    run.apply(&mut config);
    if let Some(seed) = common.seed {
        config.sim.seed = seed;
    }
    if let Some(g) = gains {
        config.sweep.gains = g.to_vec();
    }
    if let Some(s) = noise_scales {
        config.sweep.noise_scales = s.to_vec();
    }
    let threads = sweep::thread_limit()?;
    let rows = sweep::run_sweep(&config, threads)?;

    prepare_out(&common.out)?;
    write(&common.out, SWEEP, &sweep::to_csv(&rows))?;
    let ok = rows.iter().filter(|r| r.outcome.is_ok()).count();
    let message = format!("{ok} of {} grid points succeeded", rows.len());
    write_manifest(
        &common.out,
        &RunManifest {
            command: "sweep".into(),
            config_path: common.config.as_ref().map(|p| p.display().to_string()),
            seed: config.sim.seed,
            config,
            out_dir: common.out.display().to_string(),
            artifacts: vec![SWEEP.into(), MANIFEST.into()],
            passed: ok > 0,
            summary: message.clone(),
        },
    )?;
    if ok == 0 {
        let all_invalid = rows
            .iter()
            .all(|r| matches!(r.outcome, Err(sweep::RowError::Invalid(_))));
        return Err(if all_invalid {
            CliError::Config(format!("no valid grid point: {message}"))
        } else {
            CliError::Numeric(format!("no grid point succeeded: {message}"))
        });
    }
    Ok(message)
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Simulate { common, run } => cmd_simulate(common, run),
        Command::Verify {
            common,
            inject_bad_frame,
        } => cmd_verify(common, *inject_bad_frame),
        Command::Sweep {
            common,
            run,
            gains,
            noise_scales,
        } => cmd_sweep(common, run, gains.as_deref(), noise_scales.as_deref()),
    }
}

/// Runs `cli`, reporting to stdout/stderr, and maps the outcome to an exit code.
pub fn main_with(cli: &Cli) -> ExitCode {
    match run(cli) {
        Ok(message) => {
            println!("{message}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("invobs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
