//! Deterministic input profiles `u(t) = (ω(t), a(t))`.

use std::f64::consts::TAU;

use nalgebra::Matrix3;

use crate::lie_group::Vec3;
use crate::rigid_body::RigidBodyInput;

use super::SimError;

/// Which one-sided limit to take at a discontinuity of a piecewise profile.
///
/// Integrator stages that start a step sample from the right; the stage at
/// the end of a step samples from the left, so a pulse edge that falls on
/// the step grid is never smeared across a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputProfile {
    /// No rotation; specific force cancels gravity in the current attitude.
    Level,
    /// Per-axis sinusoidal body rate and specific force.
    Sinusoid {
        rate_amplitude: Vec3,
        rate_frequency: f64,
        rate_phase: Vec3,
        accel_offset: Vec3,
        accel_amplitude: Vec3,
        accel_frequency: f64,
        accel_phase: Vec3,
    },
    /// `+rate` on `[start, start + width)`, `−rate` on the next `width`
    /// seconds, zero elsewhere. Specific force holds level flight.
    Doublet { rate: Vec3, start: f64, width: f64 },
}

impl InputProfile {
    pub const NAMES: [&'static str; 3] = ["level", "sinusoid", "doublet"];

    /// Built-in profile with default parameters.
    pub fn from_name(name: &str) -> Result<Self, SimError> {
        match name {
            "level" => Ok(Self::Level),
            "sinusoid" => Ok(Self::default_sinusoid()),
            "doublet" => Ok(Self::default_doublet()),
            other => Err(SimError::UnknownProfile(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Level => "level",
            Self::Sinusoid { .. } => "sinusoid",
            Self::Doublet { .. } => "doublet",
        }
    }

    pub fn default_sinusoid() -> Self {
        Self::Sinusoid {
            rate_amplitude: Vec3::new(0.5, 0.5, 0.5),
            rate_frequency: 0.2,
            rate_phase: Vec3::zeros(),
            accel_offset: Vec3::new(0.0, 0.0, -9.80665),
            accel_amplitude: Vec3::new(2.0, 0.5, 1.0),
            accel_frequency: 0.5,
            accel_phase: Vec3::zeros(),
        }
    }

    pub fn default_doublet() -> Self {
        Self::Doublet {
            rate: Vec3::new(0.4, 0.0, 0.0),
            start: 1.0,
            width: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let finite = |v: &Vec3| v.iter().all(|x| x.is_finite());
        let ok = match self {
            Self::Level => true,
            Self::Sinusoid {
                rate_amplitude,
                rate_frequency,
                rate_phase,
                accel_offset,
                accel_amplitude,
                accel_frequency,
                accel_phase,
            } => {
                [
                    rate_amplitude,
                    rate_phase,
                    accel_offset,
                    accel_amplitude,
                    accel_phase,
                ]
                .into_iter()
                .all(finite)
                    && rate_frequency.is_finite()
                    && accel_frequency.is_finite()
            }
            Self::Doublet { rate, start, width } => {
                finite(rate) && start.is_finite() && width.is_finite() && *width > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!(
                "invalid {} profile parameters",
                self.name()
            )))
        }
    }

    /// Input at time `t` for a body with attitude `attitude`.
    pub fn evaluate(
        &self,
        t: f64,
        attitude: &Matrix3<f64>,
        gravity: &Vec3,
        side: Side,
    ) -> RigidBodyInput {
        let hold_level = || -(attitude.transpose() * gravity);
        match self {
            Self::Level => RigidBodyInput {
                omega: Vec3::zeros(),
                accel: hold_level(),
            },
            Self::Sinusoid {
                rate_amplitude,
                rate_frequency,
                rate_phase,
                accel_offset,
                accel_amplitude,
                accel_frequency,
                accel_phase,
            } => {
                let wave = |amplitude: &Vec3, frequency: f64, phase: &Vec3| {
                    Vec3::from_fn(|i, _| amplitude[i] * (TAU * frequency * t + phase[i]).sin())
                };
                RigidBodyInput {
                    omega: wave(rate_amplitude, *rate_frequency, rate_phase),
                    accel: accel_offset + wave(accel_amplitude, *accel_frequency, accel_phase),
                }
            }
            Self::Doublet { rate, start, width } => {
                let mid = start + width;
                let end = mid + width;
                let inside = |a: f64, b: f64| match side {
                    Side::Right => t >= a && t < b,
                    Side::Left => t > a && t <= b,
                };
                let omega = if inside(*start, mid) {
                    *rate
                } else if inside(mid, end) {
                    -rate
                } else {
                    Vec3::zeros()
                };
                RigidBodyInput {
                    omega,
                    accel: hold_level(),
                }
            }
        }
    }
}
