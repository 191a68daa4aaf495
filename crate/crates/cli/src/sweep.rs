//! Gain and noise-level sweeps.

use std::fmt::Write as _;

use invobs_core::rigid_body::ObserverGains;
use invobs_core::simulation::{metrics, simulate, MetricsSummary, SimError};
use invobs_core::Vec3;
use nalgebra::Matrix3;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{CliError, Config};

pub const THREADS_ENV: &str = "INVOBS_THREADS";

/// One grid point: scalar gain and noise multiplier (`None` when noise is off).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub gain: f64,
    pub noise_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowError {
    /// Rejected before simulating, e.g. by the Hurwitz gate.
    Invalid(String),
    /// The run or its metrics failed.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: GridPoint,
    pub seed: u64,
    pub outcome: Result<MetricsSummary, RowError>,
}

/// Parses `INVOBS_THREADS`; `None` leaves rayon's default.
pub fn thread_limit() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
    }
}

/// Grid points sorted by `(gain, noise_scale)`.
pub fn grid(config: &Config) -> Vec<GridPoint> {
    let scales: Vec<Option<f64>> = if config.noise.spec().is_some() {
        config
            .sweep
            .noise_scales
            .iter()
            .copied()
            .map(Some)
            .collect()
    } else {
        vec![None]
    };
    let mut points: Vec<GridPoint> = config
        .sweep
        .gains
        .iter()
        .flat_map(|&gain| {
            scales
                .iter()
                .map(move |&noise_scale| GridPoint { gain, noise_scale })
        })
        .collect();
    points.sort_by(|a, b| {
        a.gain.total_cmp(&b.gain).then(
            a.noise_scale
                .unwrap_or(0.0)
                .total_cmp(&b.noise_scale.unwrap_or(0.0)),
        )
    });
    points
}

/// Seed of run `index`, drawn from its own stream of the master generator.
pub fn run_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

fn run_point(config: &Config, point: GridPoint, seed: u64) -> Result<MetricsSummary, RowError> {
    let gains = ObserverGains::new(
        Matrix3::identity() * point.gain,
        Vec3::from(config.plant.gravity),
    )
    .map_err(|e| RowError::Invalid(e.to_string()))?;
    let noise = config
        .noise
        .spec()
        .map(|n| n.scaled(point.noise_scale.unwrap_or(1.0)));
    let mut sim = config
        .sim_config_with(gains, noise)
        .map_err(|e| RowError::Invalid(e.to_string()))?;
    sim.seed = seed;
    let record = simulate(&sim).map_err(|e| match e {
        SimError::NonFinite { .. } => RowError::Failed(e.to_string()),
        other => RowError::Invalid(other.to_string()),
    })?;
    metrics(&record, &config.metrics.options()).map_err(|e| RowError::Failed(e.to_string()))
}

/// Runs every grid point independently, in parallel, in grid order.
///
/// Fails only when the shared part of the config is unusable; per-point
/// problems are reported in the rows.
pub fn run_sweep(config: &Config, threads: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    if config.sweep.gains.is_empty() {
        return Err(CliError::Config("[sweep] gains is empty".into()));
    }
    if config.noise.spec().is_some() && config.sweep.noise_scales.is_empty() {
        return Err(CliError::Config("[sweep] noise_scales is empty".into()));
    }
    config.profile.build()?;
    let points = grid(config);
    let master = config.sim.seed;
    let work = || {
        points
            .par_iter()
            .enumerate()
            .map(|(i, &point)| {
                let seed = run_seed(master, i);
                SweepRow {
                    point,
                    seed,
                    outcome: run_point(config, point, seed),
                }
            })
            .collect()
    };
    match threads {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

pub const CSV_HEADER: &str =
    "gain,noise_scale,seed,status,decay_rate,rmse_x,rmse_y,rmse_z,rmse_norm,max_eta_after_transient,error";

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let scale = row
            .point
            .noise_scale
            .map_or_else(|| "off".to_string(), |s| s.to_string());
        let _ = write!(out, "{},{scale},{},", row.point.gain, row.seed);
        match &row.outcome {
            Ok(m) => {
                let decay = m
                    .decay_rate
                    .map_or_else(String::new, |r| format!("{r:.10e}"));
                let _ = writeln!(
                    out,
                    "ok,{decay},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},",
                    m.rmse.x, m.rmse.y, m.rmse.z, m.rmse_norm, m.max_eta_after_transient
                );
            }
            Err(RowError::Invalid(e)) => {
                let _ = writeln!(out, "invalid,,,,,,,{}", quote(e));
            }
            Err(RowError::Failed(e)) => {
                let _ = writeln!(out, "failed,,,,,,,{}", quote(e));
            }
        }
    }
    out
}
