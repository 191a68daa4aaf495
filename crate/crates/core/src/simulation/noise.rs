//! Band-limited approximation of continuous-time white measurement noise.
//!
//! A process with power spectral density `S` sampled every `Δt = 1/rate`
//! seconds and held in between has per-sample variance `σ² = S·rate`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::lie_group::{exp_so3, Rotation, Vec3};
use crate::rigid_body::{Measurement, RigidBodyInput};

use super::SimError;

/// Isotropic PSDs of the four noise channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Position noise [m²/Hz].
    pub psd_q: f64,
    /// Attitude noise, applied as `R exp(⌊w⌋)` [1/Hz].
    pub psd_r: f64,
    /// Body-rate noise [(rad/s)²/Hz].
    pub psd_omega: f64,
    /// Specific-force noise [(m/s²)²/Hz].
    pub psd_a: f64,
    /// Noise sampling rate [Hz].
    pub sample_rate: f64,
}

impl NoiseSpec {
    /// 5e-4 m²/Hz, 1e-7 1/Hz, 1e-5 (rad/s)²/Hz, 2e-2 (m/s²)²/Hz at 1000 Hz.
    pub fn paper() -> Self {
        Self {
            psd_q: 5.0e-4,
            psd_r: 1.0e-7,
            psd_omega: 1.0e-5,
            psd_a: 2.0e-2,
            sample_rate: 1000.0,
        }
    }

    pub fn zero(sample_rate: f64) -> Self {
        Self {
            psd_q: 0.0,
            psd_r: 0.0,
            psd_omega: 0.0,
            psd_a: 0.0,
            sample_rate,
        }
    }

    /// Every PSD multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            psd_q: self.psd_q * factor,
            psd_r: self.psd_r * factor,
            psd_omega: self.psd_omega * factor,
            psd_a: self.psd_a * factor,
            sample_rate: self.sample_rate,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let psds = [self.psd_q, self.psd_r, self.psd_omega, self.psd_a];
        if !psds.iter().all(|p| p.is_finite() && *p >= 0.0) {
            return Err(SimError::InvalidConfig(
                "noise PSDs must be finite and non-negative".into(),
            ));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(SimError::InvalidConfig(
                "noise sample rate must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn interval(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Per-axis discrete variances `PSD·rate` for `(q, R, ω, a)`.
    pub fn variances(&self) -> [f64; 4] {
        [self.psd_q, self.psd_r, self.psd_omega, self.psd_a].map(|p| p * self.sample_rate)
    }
}

/// One draw of all four channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSample {
    pub w_q: Vec3,
    pub w_r: Vec3,
    pub w_omega: Vec3,
    pub w_a: Vec3,
}

impl NoiseSample {
    /// Draws channels in the fixed order `q, R, ω, a`, three axes each.
    pub fn draw<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> Self {
        let [vq, vr, vw, va] = spec.variances();
        let mut channel = |variance: f64| {
            let sigma = variance.sqrt();
            Vec3::from_fn(|_, _| sigma * rng.sample::<f64, _>(StandardNormal))
        };
        Self {
            w_q: channel(vq),
            w_r: channel(vr),
            w_omega: channel(vw),
            w_a: channel(va),
        }
    }

    pub fn apply(&self, y: &Measurement, u: &RigidBodyInput) -> (Measurement, RigidBodyInput) {
        let attitude =
            Rotation::from_matrix_unchecked(y.attitude.matrix() * exp_so3(&self.w_r).matrix());
        (
            Measurement {
                q: y.q + self.w_q,
                attitude,
            },
            RigidBodyInput {
                omega: u.omega + self.w_omega,
                accel: u.accel + self.w_a,
            },
        )
    }
}

/// `y_q = q + w_q`, `y_R = R exp(⌊w_R⌋)`, `u_ω = ω + w_ω`, `u_a = a + w_a`.
pub fn corrupt<R: Rng + ?Sized>(
    y: &Measurement,
    u: &RigidBodyInput,
    noise: &NoiseSpec,
    rng: &mut R,
) -> (Measurement, RigidBodyInput) {
    NoiseSample::draw(noise, rng).apply(y, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_group::random_rotation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_point() -> (Measurement, RigidBodyInput) {
        (
            Measurement {
                q: Vec3::new(1.0, -2.0, 3.0),
                attitude: random_rotation(8),
            },
            RigidBodyInput {
                omega: Vec3::new(0.1, 0.2, 0.3),
                accel: Vec3::new(0.0, 1.0, -9.8),
            },
        )
    }

    #[test]
    fn zero_psd_leaves_signals_unchanged() {
        let (y, u) = sample_point();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (ym, um) = corrupt(&y, &u, &NoiseSpec::zero(1000.0), &mut rng);
        assert_eq!(ym, y);
        assert_eq!(um, u);
    }

    #[test]
    fn published_position_sigma() {
        let [vq, ..] = NoiseSpec::paper().variances();
        assert!((vq - 0.5).abs() < 1e-15);
        assert!((vq.sqrt() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn noisy_attitude_stays_on_so3() {
        let (y, u) = sample_point();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = NoiseSpec::paper().scaled(1.0e4);
        for _ in 0..10_000 {
            let (ym, _) = corrupt(&y, &u, &spec, &mut rng);
            assert!(ym.attitude.orthogonality_error() <= 1e-12);
            assert!((ym.attitude.determinant() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(NoiseSpec::paper().validate().is_ok());
        let mut bad = NoiseSpec::paper();
        bad.psd_a = -1.0;
        assert!(bad.validate().is_err());
        let mut bad = NoiseSpec::paper();
        bad.sample_rate = 0.0;
        assert!(bad.validate().is_err());
    }
}
