//! TOML run configuration.
//!
//! Every field is optional. An empty file gives the clean straight-and-level
//! scenario: `v₀ = (20, 0, 0)` m/s, `R₀ = I`, `x̂₀ = 0`, `L = 10 I`,
//! sinusoid inputs, 10 s at `dt = 1 ms`.

use std::path::Path;

use invobs_core::rigid_body::{ObserverGains, RigidBodyState, GRAVITY_NED};
use invobs_core::simulation::{InputProfile, MetricsOptions, NoiseSpec, ObserverInit, SimConfig};
use invobs_core::suite::SuiteOptions;
use invobs_core::{Rotation, Vec3};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::CliError;

type V3 = [f64; 3];
type M3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub plant: PlantSection,
    pub observer: ObserverSection,
    pub sim: SimSection,
    pub noise: NoiseSection,
    pub profile: ProfileSection,
    pub metrics: MetricsSection,
    pub verify: SuiteOptions,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantSection {
    /// Initial body velocity [m/s].
    pub v0: V3,
    /// Initial position [m].
    pub q0: V3,
    /// Initial attitude, rows of `R_IB`. Projected onto SO(3).
    pub r0: M3,
    /// Gravity in the inertial frame [m/s²].
    pub gravity: V3,
}

impl Default for PlantSection {
    fn default() -> Self {
        Self {
            v0: [20.0, 0.0, 0.0],
            q0: [0.0; 3],
            r0: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            gravity: GRAVITY_NED.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObserverSection {
    /// Scalar gain `k` for `L = k I`. Ignored when `l` is set.
    pub gain: f64,
    /// Full gain matrix, rows.
    pub l: Option<M3>,
    /// Initial estimate `x̂(0)`. Ignored when `z0` is set.
    pub x_hat0: V3,
    /// Initial internal state `z(0)`.
    pub z0: Option<V3>,
}

impl Default for ObserverSection {
    fn default() -> Self {
        Self {
            gain: 10.0,
            l: None,
            x_hat0: [0.0; 3],
            z0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub t_end: f64,
    pub dt: f64,
    pub seed: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            dt: 1.0e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    #[default]
    Off,
    /// Published PSDs at 1000 Hz; the section's PSD fields are ignored.
    Paper,
    /// PSDs and rate from the section.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub mode: NoiseMode,
    pub psd_q: f64,
    pub psd_r: f64,
    pub psd_omega: f64,
    pub psd_a: f64,
    pub sample_rate: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let p = NoiseSpec::paper();
        Self {
            mode: NoiseMode::Off,
            psd_q: p.psd_q,
            psd_r: p.psd_r,
            psd_omega: p.psd_omega,
            psd_a: p.psd_a,
            sample_rate: p.sample_rate,
        }
    }
}

impl NoiseSection {
    pub fn spec(&self) -> Option<NoiseSpec> {
        match self.mode {
            NoiseMode::Off => None,
            NoiseMode::Paper => Some(NoiseSpec::paper()),
            NoiseMode::Custom => Some(NoiseSpec {
                psd_q: self.psd_q,
                psd_r: self.psd_r,
                psd_omega: self.psd_omega,
                psd_a: self.psd_a,
                sample_rate: self.sample_rate,
            }),
        }
    }
}

/// Input profile. Unset parameters take the built-in profile's defaults;
/// parameters that do not belong to `kind` are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSection {
    pub kind: String,
    pub rate_amplitude: Option<V3>,
    pub rate_frequency: Option<f64>,
    pub rate_phase: Option<V3>,
    pub accel_offset: Option<V3>,
    pub accel_amplitude: Option<V3>,
    pub accel_frequency: Option<f64>,
    pub accel_phase: Option<V3>,
    pub rate: Option<V3>,
    pub start: Option<f64>,
    pub width: Option<f64>,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            kind: "sinusoid".into(),
            rate_amplitude: None,
            rate_frequency: None,
            rate_phase: None,
            accel_offset: None,
            accel_amplitude: None,
            accel_frequency: None,
            accel_phase: None,
            rate: None,
            start: None,
            width: None,
        }
    }
}

fn pick(v: Option<V3>, default: Vec3) -> Vec3 {
    v.map_or(default, Vec3::from)
}

impl ProfileSection {
    pub fn build(&self) -> Result<InputProfile, CliError> {
        let profile =
            InputProfile::from_name(&self.kind).map_err(|e| CliError::Config(e.to_string()))?;
        let sinusoid_set = [
            self.rate_amplitude.is_some(),
            self.rate_frequency.is_some(),
            self.rate_phase.is_some(),
            self.accel_offset.is_some(),
            self.accel_amplitude.is_some(),
            self.accel_frequency.is_some(),
            self.accel_phase.is_some(),
        ];
        let doublet_set = [
            self.rate.is_some(),
            self.start.is_some(),
            self.width.is_some(),
        ];
        let stray = match profile {
            InputProfile::Level => sinusoid_set.iter().chain(&doublet_set).any(|&s| s),
            InputProfile::Sinusoid { .. } => doublet_set.iter().any(|&s| s),
            InputProfile::Doublet { .. } => sinusoid_set.iter().any(|&s| s),
        };
        if stray {
            return Err(CliError::Config(format!(
                "[profile] sets parameters that do not apply to kind {:?}",
                self.kind
            )));
        }
        Ok(match profile {
            InputProfile::Level => InputProfile::Level,
            InputProfile::Sinusoid {
                rate_amplitude,
                rate_frequency,
                rate_phase,
                accel_offset,
                accel_amplitude,
                accel_frequency,
                accel_phase,
            } => InputProfile::Sinusoid {
                rate_amplitude: pick(self.rate_amplitude, rate_amplitude),
                rate_frequency: self.rate_frequency.unwrap_or(rate_frequency),
                rate_phase: pick(self.rate_phase, rate_phase),
                accel_offset: pick(self.accel_offset, accel_offset),
                accel_amplitude: pick(self.accel_amplitude, accel_amplitude),
                accel_frequency: self.accel_frequency.unwrap_or(accel_frequency),
                accel_phase: pick(self.accel_phase, accel_phase),
            },
            InputProfile::Doublet { rate, start, width } => InputProfile::Doublet {
                rate: pick(self.rate, rate),
                start: self.start.unwrap_or(start),
                width: self.width.unwrap_or(width),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    /// Start of the RMSE window [s].
    pub window_start: f64,
    /// End of the RMSE window [s]; the end of the run when unset.
    pub window_end: Option<f64>,
}

impl Default for MetricsSection {
    fn default() -> Self {
        let d = MetricsOptions::default();
        Self {
            window_start: d.window_start,
            window_end: d.window_end,
        }
    }
}

impl MetricsSection {
    pub fn options(&self) -> MetricsOptions {
        MetricsOptions {
            window_start: self.window_start,
            window_end: self.window_end,
            ..MetricsOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Scalar gains `k` for `L = k I`.
    pub gains: Vec<f64>,
    /// Multipliers on every noise PSD. Only used when noise is enabled.
    pub noise_scales: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            gains: vec![1.0, 5.0, 10.0, 20.0],
            noise_scales: vec![1.0],
        }
    }
}

fn matrix(rows: &M3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| rows[i][j])
}

impl Config {
    /// Reads `path`, or returns the defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn gains(&self) -> Result<ObserverGains, CliError> {
        let l = match &self.observer.l {
            Some(rows) => matrix(rows),
            None => Matrix3::identity() * self.observer.gain,
        };
        ObserverGains::new(l, Vec3::from(self.plant.gravity))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Simulation config with gains `gains`, validated.
    pub fn sim_config_with(
        &self,
        gains: ObserverGains,
        noise: Option<NoiseSpec>,
    ) -> Result<SimConfig, CliError> {
        let attitude =
            Rotation::from_row_slice(self.plant.r0.as_flattened().try_into().expect("3x3"))
                .map_err(|e| CliError::Config(format!("[plant] r0: {e}")))?;
        let config = SimConfig {
            t_end: self.sim.t_end,
            dt: self.sim.dt,
            gains,
            initial: RigidBodyState {
                v: Vec3::from(self.plant.v0),
                q: Vec3::from(self.plant.q0),
                attitude,
            },
            observer_init: match self.observer.z0 {
                Some(z) => ObserverInit::Internal(Vec3::from(z)),
                None => ObserverInit::Estimate(Vec3::from(self.observer.x_hat0)),
            },
            profile: self.profile.build()?,
            input_frame: Rotation::identity(),
            noise,
            seed: self.sim.seed,
        };
        config
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        self.sim_config_with(self.gains()?, self.noise.spec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default_scenario() {
        let config = Config::parse("").unwrap();
        assert_eq!(config, Config::default());
        let sim = config.sim_config().unwrap();
        assert_eq!(sim, SimConfig::default());
    }

    #[test]
    fn sections_parse() {
        let config = Config::parse(
            r#"
            [plant]
            v0 = [10.0, 1.0, 0.0]
            [observer]
            gain = 5.0
            [sim]
            t_end = 2.0
            seed = 7
            [noise]
            mode = "custom"
            psd_q = 1e-3
            [profile]
            kind = "doublet"
            width = 0.25
            [verify]
            samples = 10
            [verify.tolerances]
            alpha_formula = 1e-10
            [sweep]
            gains = [2.0]
            "#,
        )
        .unwrap();
        let sim = config.sim_config().unwrap();
        assert_eq!(sim.initial.v, Vec3::new(10.0, 1.0, 0.0));
        assert_eq!(*sim.gains.l(), Matrix3::identity() * 5.0);
        assert_eq!(sim.seed, 7);
        assert_eq!(sim.noise.unwrap().psd_q, 1e-3);
        assert_eq!(sim.noise.unwrap().psd_r, NoiseSpec::paper().psd_r);
        assert!(matches!(sim.profile, InputProfile::Doublet { width, .. } if width == 0.25));
        assert_eq!(config.verify.samples, 10);
        assert_eq!(config.verify.tolerances.alpha_formula, 1e-10);
        assert_eq!(config.sweep.gains, vec![2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "[plant]\nvelocity = [1.0, 2.0, 3.0]",
            "[sim]\ndt = \"fast\"",
            "[profile]\nkind = \"loop\"",
            "[profile]\nkind = \"level\"\nwidth = 1.0",
            "[observer]\ngain = 0.0",
            "[observer]\ngain = -1.0",
            "[sim]\ndt = 0.0",
            "[noise]\nmode = \"paper\"\n[sim]\ndt = 3e-4",
            "[plant]\nr0 = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]",
        ] {
            let result = Config::parse(text).and_then(|c| c.sim_config());
            assert!(matches!(result, Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn full_gain_matrix_overrides_scalar() {
        let config = Config::parse(
            "[observer]\ngain = 1.0\nl = [[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 4.0]]",
        )
        .unwrap();
        assert_eq!(
            *config.gains().unwrap().l(),
            Matrix3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0))
        );
    }
}
