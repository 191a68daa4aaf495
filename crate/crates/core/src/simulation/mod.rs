//! Coupled plant/observer simulation of the rigid-body velocity observer.
//!
//! The plant `(v, q, R_IB)` and the observer state `z` are advanced together
//! by classical RK4. The attitude is integrated in ambient matrix form and
//! projected back onto SO(3) at the end of every step.

use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lie_group::{hat, project_to_so3, LieError, Rotation, Vec3};
use crate::rigid_body::{
    f_rb, rb_observer_design, to_dvector, to_vec3, GainError, Measurement, ObserverGains,
    RigidBodyDesign, RigidBodyInput, RigidBodyModel, RigidBodyState, So3Action,
};
use crate::symmetry::{self, FrameError, TransformationGroup};

pub mod metrics;
pub mod noise;
pub mod profile;
pub mod record;

pub use metrics::{
    fit_decay_rate, linear_fit, metrics, LinearFit, MetricsError, MetricsOptions, MetricsSummary,
};
pub use noise::{corrupt, NoiseSample, NoiseSpec};
pub use profile::{InputProfile, Side};
pub use record::{NoisySignals, RecordError, TrajectoryRecord, TrajectorySample};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("unknown input profile {0:?} (expected level, sinusoid or doublet)")]
    UnknownProfile(String),
    #[error("state left the finite range at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Gain(#[from] GainError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// How the observer is initialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObserverInit {
    /// Initial estimate `x̂(0)`; `z(0) = x̂(0) − β(y(0))`.
    Estimate(Vec3),
    /// Initial internal state `z(0)`.
    Internal(Vec3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub gains: ObserverGains,
    pub initial: RigidBodyState,
    pub observer_init: ObserverInit,
    pub profile: InputProfile,
    /// The plant input is `ψ_g(profile)` for this `g`.
    pub input_frame: Rotation,
    pub noise: Option<NoiseSpec>,
    pub seed: u64,
}

impl Default for SimConfig {
    /// Straight-and-level start at 20 m/s, `L = 10 I`, zero initial estimate.
    fn default() -> Self {
        Self {
            t_end: 10.0,
            dt: 1.0e-3,
            gains: ObserverGains::default(),
            initial: RigidBodyState {
                v: Vec3::new(20.0, 0.0, 0.0),
                q: Vec3::zeros(),
                attitude: Rotation::identity(),
            },
            observer_init: ObserverInit::Estimate(Vec3::zeros()),
            profile: InputProfile::default_sinusoid(),
            input_frame: Rotation::identity(),
            noise: None,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Integrator steps per noise sample, if noise is enabled.
    pub fn steps_per_noise_sample(&self) -> Option<usize> {
        self.noise
            .as_ref()
            .map(|n| (n.interval() / self.dt).round().max(1.0) as usize)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::InvalidConfig("dt must be positive".into()));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(SimError::InvalidConfig("t_end must be at least dt".into()));
        }
        if !self.initial.is_finite() {
            return Err(SimError::InvalidConfig(
                "initial state must be finite".into(),
            ));
        }
        let init = match self.observer_init {
            ObserverInit::Estimate(v) | ObserverInit::Internal(v) => v,
        };
        if !init.iter().all(|x| x.is_finite()) {
            return Err(SimError::InvalidConfig(
                "initial observer state must be finite".into(),
            ));
        }
        self.profile.validate()?;
        if let Some(noise) = &self.noise {
            noise.validate()?;
            let ratio = noise.interval() / self.dt;
            if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
                return Err(SimError::InvalidConfig(format!(
                    "noise interval {} s is not an integer multiple of dt = {} s",
                    noise.interval(),
                    self.dt
                )));
            }
        }
        Ok(())
    }

    /// The same scenario seen through `g`: initial conditions via
    /// `φ_g, ϱ_g` and inputs via `ψ_g`.
    pub fn transformed(&self, g: &Rotation) -> SimConfig {
        let mut out = self.clone();
        out.initial = RigidBodyState {
            v: g.matrix() * self.initial.v,
            q: self.initial.q,
            attitude: So3Action.rho(g, &self.initial.measurement()).attitude,
        };
        out.observer_init = match self.observer_init {
            ObserverInit::Estimate(v) => ObserverInit::Estimate(g.matrix() * v),
            ObserverInit::Internal(z) => ObserverInit::Internal(g.matrix() * z),
        };
        out.input_frame = Rotation::from_matrix_unchecked(g.matrix() * self.input_frame.matrix());
        out
    }

    /// Plant input at `t` for the current attitude.
    pub fn input(&self, t: f64, attitude: &Matrix3<f64>, side: Side) -> RigidBodyInput {
        let g = self.input_frame.matrix();
        // Undo ϱ_g on the attitude, evaluate the base profile, then apply ψ_g.
        let base_attitude = attitude * g;
        let u = self
            .profile
            .evaluate(t, &base_attitude, self.gains.gravity(), side);
        RigidBodyInput {
            omega: g * u.omega,
            accel: g * u.accel,
        }
    }
}

/// Observer wiring for the rigid-body system.
#[derive(Debug, Clone, Copy)]
pub struct RigidBodyObserver {
    pub model: RigidBodyModel,
    pub design: RigidBodyDesign,
}

impl RigidBodyObserver {
    pub fn new(gains: &ObserverGains) -> Self {
        Self {
            model: RigidBodyModel {
                gravity: *gains.gravity(),
            },
            design: rb_observer_design(gains),
        }
    }

    pub fn alpha(&self, z: &Vec3, y: &Measurement, u: &RigidBodyInput) -> Result<Vec3, FrameError> {
        symmetry::alpha(&self.model, &self.design, &So3Action, &to_dvector(z), y, u)
            .map(|a| to_vec3(&a))
    }

    pub fn beta(&self, y: &Measurement) -> Result<Vec3, FrameError> {
        symmetry::beta(&self.design, &So3Action, y).map(|b| to_vec3(&b))
    }

    pub fn estimate(&self, z: &Vec3, y: &Measurement) -> Result<Vec3, FrameError> {
        Ok(z + self.beta(y)?)
    }

    pub fn invariant_error(&self, z: &Vec3, v: &Vec3, y: &Measurement) -> Result<Vec3, FrameError> {
        symmetry::invariant_error(&self.design, &So3Action, &to_dvector(z), &to_dvector(v), y)
            .map(|e| to_vec3(&e.eta))
    }
}

/// What the observer sees during a step.
#[derive(Debug, Clone, Copy)]
pub enum ObserverFeed<'a> {
    /// The true measured state and input at every stage.
    Clean,
    /// A measurement and input held constant over the step.
    Held {
        y: &'a Measurement,
        u: &'a RigidBodyInput,
    },
}

struct Stage {
    v: Vec3,
    q: Vec3,
    r: Matrix3<f64>,
    z: Vec3,
}

struct Rate {
    v: Vec3,
    q: Vec3,
    r: Matrix3<f64>,
    z: Vec3,
}

impl Stage {
    fn advance(&self, k: &Rate, h: f64) -> Stage {
        Stage {
            v: self.v + k.v * h,
            q: self.q + k.q * h,
            r: self.r + k.r * h,
            z: self.z + k.z * h,
        }
    }
}

/// One RK4 step of the coupled plant and observer.
///
/// `input(t, attitude, side)` supplies the plant input at each stage time.
#[allow(clippy::too_many_arguments)]
pub fn step<U>(
    state: &RigidBodyState,
    z: &Vec3,
    t: f64,
    dt: f64,
    gains: &ObserverGains,
    observer: &RigidBodyObserver,
    input: U,
    feed: ObserverFeed<'_>,
) -> Result<(RigidBodyState, Vec3), SimError>
where
    U: Fn(f64, &Matrix3<f64>, Side) -> RigidBodyInput,
{
    if dt.is_nan() || dt <= 0.0 {
        return Err(SimError::InvalidConfig("dt must be positive".into()));
    }
    let derivative = |s: &Stage, ts: f64, side: Side| -> Result<Rate, SimError> {
        let u = input(ts, &s.r, side);
        let y = Measurement {
            q: s.q,
            attitude: Rotation::from_matrix_unchecked(s.r),
        };
        let z_dot = match feed {
            ObserverFeed::Clean => observer.alpha(&s.z, &y, &u)?,
            ObserverFeed::Held { y: ym, u: um } => observer.alpha(&s.z, ym, um)?,
        };
        Ok(Rate {
            v: f_rb(&s.v, &y, &u, gains.gravity()),
            q: s.r * s.v,
            r: s.r * hat(&u.omega),
            z: z_dot,
        })
    };

    let s0 = Stage {
        v: state.v,
        q: state.q,
        r: *state.attitude.matrix(),
        z: *z,
    };
    let half = 0.5 * dt;
    let k1 = derivative(&s0, t, Side::Right)?;
    let k2 = derivative(&s0.advance(&k1, half), t + half, Side::Right)?;
    let k3 = derivative(&s0.advance(&k2, half), t + half, Side::Right)?;
    let k4 = derivative(&s0.advance(&k3, dt), t + dt, Side::Left)?;
    let w = dt / 6.0;
    let combine =
        |a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3, x: &Vec3| x + (a + b * 2.0 + c * 2.0 + d) * w;

    let v = combine(&k1.v, &k2.v, &k3.v, &k4.v, &s0.v);
    let q = combine(&k1.q, &k2.q, &k3.q, &k4.q, &s0.q);
    let z_next = combine(&k1.z, &k2.z, &k3.z, &k4.z, &s0.z);
    let r = s0.r + (k1.r + k2.r * 2.0 + k3.r * 2.0 + k4.r) * w;

    let t_next = t + dt;
    let finite = |x: &Vec3| x.iter().all(|c| c.is_finite());
    if !(finite(&v) && finite(&q) && finite(&z_next)) {
        return Err(SimError::NonFinite { t: t_next });
    }
    let attitude = project_to_so3(&r).map_err(|_: LieError| SimError::NonFinite { t: t_next })?;
    Ok((RigidBodyState { v, q, attitude }, z_next))
}

fn sample_at(
    t: f64,
    state: &RigidBodyState,
    z: &Vec3,
    y_obs: &Measurement,
    observer: &RigidBodyObserver,
    noisy: Option<NoisySignals>,
) -> Result<TrajectorySample, SimError> {
    Ok(TrajectorySample {
        t,
        v: state.v,
        q: state.q,
        attitude: state.attitude,
        z: *z,
        v_hat: observer.estimate(z, y_obs)?,
        eta: observer.invariant_error(z, &state.v, y_obs)?,
        noisy,
    })
}

/// Runs the configured scenario.
///
/// With noise enabled the observer consumes measurements and inputs that
/// are resampled every noise interval and held in between, while the plant
/// integrates the clean signals. `v̂` and `η` are evaluated with the
/// measurement the observer currently holds.
pub fn simulate(config: &SimConfig) -> Result<TrajectoryRecord, SimError> {
    config.validate()?;
    let observer = RigidBodyObserver::new(&config.gains);
    let steps = config.steps();
    let per_sample = config.steps_per_noise_sample();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let held_signals =
        |rng: &mut ChaCha8Rng, t: f64, state: &RigidBodyState| -> Option<NoisySignals> {
            let spec = config.noise.as_ref()?;
            let u = config.input(t, state.attitude.matrix(), Side::Right);
            let (y, u) = corrupt(&state.measurement(), &u, spec, rng);
            Some(NoisySignals { y, u })
        };

    let mut state = config.initial;
    let mut held = held_signals(&mut rng, 0.0, &state);
    let y0 = held.map_or_else(|| state.measurement(), |h| h.y);
    let mut z = match config.observer_init {
        ObserverInit::Estimate(x_hat) => x_hat - observer.beta(&y0)?,
        ObserverInit::Internal(z0) => z0,
    };

    let mut samples = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        let t = n as f64 * config.dt;
        if let (Some(m), true) = (per_sample, n > 0) {
            if n % m == 0 {
                held = held_signals(&mut rng, t, &state);
            }
        }
        let y_obs = held.map_or_else(|| state.measurement(), |h| h.y);
        samples.push(sample_at(t, &state, &z, &y_obs, &observer, held)?);
        if n == steps {
            break;
        }
        let feed = match &held {
            Some(h) => ObserverFeed::Held { y: &h.y, u: &h.u },
            None => ObserverFeed::Clean,
        };
        let input = |ts: f64, r: &Matrix3<f64>, side: Side| config.input(ts, r, side);
        (state, z) = step(
            &state,
            &z,
            t,
            config.dt,
            &config.gains,
            &observer,
            input,
            feed,
        )?;
    }
    Ok(TrajectoryRecord { samples })
}
