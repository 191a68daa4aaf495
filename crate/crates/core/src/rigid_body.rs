//! Rigid-body velocity observer on SO(3).
//!
//! Unmeasured state is body velocity `v`; the measured state is position `q`
//! with attitude `R_IB` (body to inertial); inputs are body rate `ω` and
//! body-frame specific force `a`:
//!
//! ```text
//! v̇    = v × ω + R_IBᵀ g + a
//! q̇    = R_IB v
//! Ṙ_IB = R_IB ⌊ω⌋
//! ```
//!
//! SO(3) acts by `v ↦ R_g v`, `(q, R_IB) ↦ (q, R_IB R_gᵀ)`, `(ω, a) ↦ (R_g ω, R_g a)`.
//! With moving frame `γ(y) = R_IB` and `ℓ(y) = L q` the observer map is
//! `β(y) = R_IBᵀ L q` and the invariant error obeys `η̇ = −L η`.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DVector, Matrix3};
use rand::Rng;

use crate::lie_group::{exp_so3, hat, sample_rotation, vee_of_skew_part, Rotation, Vec3};
use crate::symmetry::{
    FrameError, FrameSample, GroupElement, LambdaSample, MeasuredSpace, ObserverDesign,
    SystemModel, SystemSample, TangentVector, TransformationGroup,
};

/// Standard gravity along +z of a north-east-down inertial frame [m/s²].
pub const GRAVITY_NED: Vec3 = Vec3::new(0.0, 0.0, 9.80665);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GainError {
    #[error("-L is not Hurwitz: eigenvalue with real part {0} >= 0")]
    NotHurwitz(f64),
    #[error("gain matrix has non-finite entries")]
    NonFinite,
}

/// Full plant state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyState {
    /// Body velocity [m/s].
    pub v: Vec3,
    /// Inertial position [m].
    pub q: Vec3,
    pub attitude: Rotation,
}

impl RigidBodyState {
    pub fn measurement(&self) -> Measurement {
        Measurement {
            q: self.q,
            attitude: self.attitude,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v
            .iter()
            .chain(self.q.iter())
            .chain(self.attitude.matrix().iter())
            .all(|x| x.is_finite())
    }
}

/// Measured part `y = (q, R_IB)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub q: Vec3,
    pub attitude: Rotation,
}

/// Tangent vector `(q̇, Ṙ_IB)` with `Ṙ_IB` in ambient matrix form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseTangent {
    pub q_dot: Vec3,
    pub r_dot: Matrix3<f64>,
}

impl Sub for PoseTangent {
    type Output = PoseTangent;
    fn sub(self, rhs: PoseTangent) -> PoseTangent {
        PoseTangent {
            q_dot: self.q_dot - rhs.q_dot,
            r_dot: self.r_dot - rhs.r_dot,
        }
    }
}

impl Add for PoseTangent {
    type Output = PoseTangent;
    fn add(self, rhs: PoseTangent) -> PoseTangent {
        PoseTangent {
            q_dot: self.q_dot + rhs.q_dot,
            r_dot: self.r_dot + rhs.r_dot,
        }
    }
}

impl Mul<f64> for PoseTangent {
    type Output = PoseTangent;
    fn mul(self, s: f64) -> PoseTangent {
        PoseTangent {
            q_dot: self.q_dot * s,
            r_dot: self.r_dot * s,
        }
    }
}

impl TangentVector for PoseTangent {
    fn norm(&self) -> f64 {
        (self.q_dot.norm_squared() + self.r_dot.norm_squared()).sqrt()
    }
}

impl MeasuredSpace for Measurement {
    type Tangent = PoseTangent;

    fn dof(&self) -> usize {
        6
    }

    /// Directions 0..3 translate `q`; 3..6 right-multiply `R_IB` by `exp(step·eᵢ)`.
    fn perturb(&self, direction: usize, step: f64) -> Self {
        let mut out = *self;
        if direction < 3 {
            out.q[direction] += step;
        } else {
            let mut w = Vec3::zeros();
            w[direction - 3] = step;
            out.attitude =
                Rotation::from_matrix_unchecked(self.attitude.matrix() * exp_so3(&w).matrix());
        }
        out
    }

    fn coordinate_scale(&self, direction: usize) -> f64 {
        if direction < 3 {
            self.q[direction].abs()
        } else {
            1.0
        }
    }

    fn tangent_coordinates(&self, tangent: &PoseTangent) -> DVector<f64> {
        let w = vee_of_skew_part(&(self.attitude.matrix().transpose() * tangent.r_dot));
        DVector::from_column_slice(&[
            tangent.q_dot.x,
            tangent.q_dot.y,
            tangent.q_dot.z,
            w.x,
            w.y,
            w.z,
        ])
    }
}

/// Known input `u = (ω, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidBodyInput {
    /// Body angular velocity [rad/s].
    pub omega: Vec3,
    /// Body-frame specific force [m/s²].
    pub accel: Vec3,
}

/// Observer gain `L` and the gravity vector used by the plant model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverGains {
    l: Matrix3<f64>,
    gravity: Vec3,
}

impl ObserverGains {
    /// Accepts `l` only if every eigenvalue of `−l` has negative real part.
    pub fn new(l: Matrix3<f64>, gravity: Vec3) -> Result<Self, GainError> {
        if !l.iter().chain(gravity.iter()).all(|x| x.is_finite()) {
            return Err(GainError::NonFinite);
        }
        let worst = (-l)
            .complex_eigenvalues()
            .iter()
            .map(|c| c.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst.is_nan() || worst >= 0.0 {
            return Err(GainError::NotHurwitz(worst));
        }
        Ok(Self { l, gravity })
    }

    /// `L = k I` with NED gravity.
    pub fn scalar(k: f64) -> Result<Self, GainError> {
        Self::new(Matrix3::identity() * k, GRAVITY_NED)
    }

    pub fn l(&self) -> &Matrix3<f64> {
        &self.l
    }

    pub fn gravity(&self) -> &Vec3 {
        &self.gravity
    }
}

impl Default for ObserverGains {
    fn default() -> Self {
        Self {
            l: Matrix3::identity() * 10.0,
            gravity: GRAVITY_NED,
        }
    }
}

/// `v̇ = v × ω + R_IBᵀ g + a`.
pub fn f_rb(v: &Vec3, y: &Measurement, u: &RigidBodyInput, gravity: &Vec3) -> Vec3 {
    v.cross(&u.omega) + y.attitude.matrix().transpose() * gravity + u.accel
}

/// `(q̇, Ṙ_IB) = (R_IB v, R_IB ⌊ω⌋)`.
pub fn h_rb(v: &Vec3, y: &Measurement, u: &RigidBodyInput) -> PoseTangent {
    let r = y.attitude.matrix();
    PoseTangent {
        q_dot: r * v,
        r_dot: r * hat(&u.omega),
    }
}

pub fn to_vec3(x: &DVector<f64>) -> Vec3 {
    assert_eq!(x.len(), 3, "rigid-body x-space is three-dimensional");
    Vec3::new(x[0], x[1], x[2])
}

pub fn to_dvector(v: &Vec3) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// SO(3) transformation group of the rigid-body system.
#[derive(Debug, Clone, Copy, Default)]
pub struct So3Action;

impl TransformationGroup for So3Action {
    type Group = Rotation;
    type Measured = Measurement;
    type Input = RigidBodyInput;

    fn phi(&self, g: &Rotation, x: &DVector<f64>) -> DVector<f64> {
        to_dvector(&(g.matrix() * to_vec3(x)))
    }

    fn rho(&self, g: &Rotation, y: &Measurement) -> Measurement {
        Measurement {
            q: y.q,
            attitude: Rotation::from_matrix_unchecked(y.attitude.matrix() * g.matrix().transpose()),
        }
    }

    fn psi(&self, g: &Rotation, u: &RigidBodyInput) -> RigidBodyInput {
        RigidBodyInput {
            omega: g.matrix() * u.omega,
            accel: g.matrix() * u.accel,
        }
    }

    fn tangent_rho(&self, g: &Rotation, _y: &Measurement, y_dot: &PoseTangent) -> PoseTangent {
        PoseTangent {
            q_dot: y_dot.q_dot,
            r_dot: y_dot.r_dot * g.matrix().transpose(),
        }
    }
}

pub fn so3_group() -> So3Action {
    So3Action
}

/// Plant model `(f, h)` for the framework.
#[derive(Debug, Clone, Copy)]
pub struct RigidBodyModel {
    pub gravity: Vec3,
}

impl Default for RigidBodyModel {
    fn default() -> Self {
        Self {
            gravity: GRAVITY_NED,
        }
    }
}

impl SystemModel<So3Action> for RigidBodyModel {
    fn dim_x(&self) -> usize {
        3
    }

    fn f(&self, x: &DVector<f64>, y: &Measurement, u: &RigidBodyInput) -> DVector<f64> {
        to_dvector(&f_rb(&to_vec3(x), y, u, &self.gravity))
    }

    fn h(&self, x: &DVector<f64>, y: &Measurement, u: &RigidBodyInput) -> PoseTangent {
        h_rb(&to_vec3(x), y, u)
    }
}

/// `γ(y) = R_IB`, `ℓ(y) = L q`, with closed-form tangents of `β` and `λ`.
#[derive(Debug, Clone, Copy)]
pub struct RigidBodyDesign {
    pub l: Matrix3<f64>,
}

impl ObserverDesign<So3Action> for RigidBodyDesign {
    fn frame(&self, y: &Measurement) -> Result<Rotation, FrameError> {
        if y.attitude.matrix().iter().all(|x| x.is_finite()) {
            Ok(y.attitude)
        } else {
            Err(FrameError::FrameUndefined(
                "attitude has non-finite entries".into(),
            ))
        }
    }

    fn ell(&self, y: &Measurement) -> DVector<f64> {
        to_dvector(&(self.l * y.q))
    }

    /// `T_yβ(q̇, Ṙ) = Ṙᵀ L q + Rᵀ L q̇`.
    fn tangent_beta(&self, y: &Measurement, y_dot: &PoseTangent) -> Option<DVector<f64>> {
        let r = y.attitude.matrix();
        let t = y_dot.r_dot.transpose() * self.l * y.q + r.transpose() * self.l * y_dot.q_dot;
        Some(to_dvector(&t))
    }

    /// `λ(y; ξ) = R_IB ξ`, so `T_{(y; ξ)}λ(q̇, Ṙ) = Ṙ ξ`.
    fn tangent_lambda(
        &self,
        _y: &Measurement,
        xi: &DVector<f64>,
        y_dot: &PoseTangent,
    ) -> Option<DVector<f64>> {
        Some(to_dvector(&(y_dot.r_dot * to_vec3(xi))))
    }
}

pub fn rb_observer_design(gains: &ObserverGains) -> RigidBodyDesign {
    RigidBodyDesign { l: *gains.l() }
}

/// Frame that ignores the measurement and always returns the identity.
///
/// Not equivariant; used as a negative control for the verifiers.
#[derive(Debug, Clone, Copy)]
pub struct IdentityFrameDesign {
    pub l: Matrix3<f64>,
}

impl ObserverDesign<So3Action> for IdentityFrameDesign {
    fn frame(&self, _y: &Measurement) -> Result<Rotation, FrameError> {
        Ok(Rotation::identity())
    }

    fn ell(&self, y: &Measurement) -> DVector<f64> {
        to_dvector(&(self.l * y.q))
    }
}

/// `β(y) = R_IBᵀ L q`, written out directly.
pub fn beta_closed_form(y: &Measurement, l: &Matrix3<f64>) -> Vec3 {
    y.attitude.matrix().transpose() * l * y.q
}

/// Observer field in expanded form:
///
/// `(z + RᵀLq) × ω + Rᵀg + a + ⌊ω⌋RᵀLq − RᵀLR(z + RᵀLq)`.
pub fn alpha_closed_form(
    z: &Vec3,
    y: &Measurement,
    u: &RigidBodyInput,
    gains: &ObserverGains,
) -> Vec3 {
    let r = y.attitude.matrix();
    let l = gains.l();
    let b = r.transpose() * l * y.q;
    let x_hat = z + b;
    x_hat.cross(&u.omega) + r.transpose() * gains.gravity() + u.accel + hat(&u.omega) * b
        - r.transpose() * l * r * x_hat
}

/// Invariant error dynamics `η̇ = −L η`.
pub fn rb_error_rhs(eta: &Vec3, gains: &ObserverGains) -> Vec3 {
    -(gains.l() * eta)
}

/// Box ranges for random verification samples.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SampleRanges {
    /// Body velocity half-width [m/s].
    pub velocity: f64,
    /// Position half-width [m].
    pub position: f64,
    /// Body-rate half-width [rad/s].
    pub rate: f64,
    /// Specific-force half-width [m/s²].
    pub accel: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            velocity: 25.0,
            position: 10.0,
            rate: 1.0,
            accel: 15.0,
        }
    }
}

fn uniform_vec<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> Vec3 {
    if half_width == 0.0 {
        return Vec3::zeros();
    }
    Vec3::from_fn(|_, _| rng.random_range(-half_width..=half_width))
}

impl SampleRanges {
    pub fn measurement<R: Rng + ?Sized>(&self, rng: &mut R) -> Measurement {
        Measurement {
            q: uniform_vec(rng, self.position),
            attitude: sample_rotation(rng),
        }
    }

    pub fn input<R: Rng + ?Sized>(&self, rng: &mut R) -> RigidBodyInput {
        RigidBodyInput {
            omega: uniform_vec(rng, self.rate),
            accel: uniform_vec(rng, self.accel),
        }
    }

    pub fn velocity<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        uniform_vec(rng, self.velocity)
    }

    pub fn frame_samples<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Vec<FrameSample<So3Action>> {
        (0..n)
            .map(|_| FrameSample {
                g: sample_rotation(rng),
                y: self.measurement(rng),
            })
            .collect()
    }

    pub fn system_samples<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Vec<SystemSample<So3Action>> {
        (0..n)
            .map(|_| SystemSample {
                g: sample_rotation(rng),
                x: to_dvector(&self.velocity(rng)),
                y: self.measurement(rng),
                u: self.input(rng),
            })
            .collect()
    }

    pub fn lambda_samples<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
    ) -> Vec<LambdaSample<So3Action>> {
        (0..n)
            .map(|_| LambdaSample {
                g: sample_rotation(rng),
                zeta: to_dvector(&self.velocity(rng)),
                x: to_dvector(&self.velocity(rng)),
                y: self.measurement(rng),
                u: self.input(rng),
            })
            .collect()
    }
}

/// Identity group element, for callers outside the generic layer.
pub fn identity_element() -> Rotation {
    <Rotation as GroupElement>::identity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_group::random_rotation;
    use crate::symmetry::{
        alpha, beta, check_frame_equivariance, check_system_invariance, estimate, invariant_error,
        invariant_error_rhs, normalize, NumericTangents, Tolerances,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn level(q: Vec3) -> Measurement {
        Measurement {
            q,
            attitude: Rotation::identity(),
        }
    }

    #[test]
    fn f_rb_examples() {
        let g = GRAVITY_NED;
        let f = f_rb(
            &Vec3::zeros(),
            &level(Vec3::zeros()),
            &RigidBodyInput::default(),
            &g,
        );
        assert_eq!(f, Vec3::new(0.0, 0.0, 9.80665));

        let u = RigidBodyInput {
            omega: Vec3::z(),
            accel: Vec3::zeros(),
        };
        let f = f_rb(&Vec3::x(), &level(Vec3::zeros()), &u, &Vec3::zeros());
        assert_eq!(f, Vec3::new(0.0, -1.0, 0.0));

        let y = Measurement {
            q: Vec3::zeros(),
            attitude: random_rotation(5),
        };
        let hover = RigidBodyInput {
            omega: Vec3::zeros(),
            accel: -(y.attitude.matrix().transpose() * g),
        };
        assert!(f_rb(&Vec3::new(3.0, -1.0, 2.0), &y, &hover, &g).amax() <= 1e-15);
    }

    #[test]
    fn h_rb_examples() {
        let t = h_rb(
            &Vec3::new(20.0, 0.0, 0.0),
            &level(Vec3::zeros()),
            &RigidBodyInput::default(),
        );
        assert_eq!(t.q_dot, Vec3::new(20.0, 0.0, 0.0));
        assert_eq!(t.r_dot, Matrix3::zeros());

        let mut rng = rng();
        let ranges = SampleRanges::default();
        for _ in 0..200 {
            let y = ranges.measurement(&mut rng);
            let u = ranges.input(&mut rng);
            let t = h_rb(&ranges.velocity(&mut rng), &y, &u);
            let body = y.attitude.matrix().transpose() * t.r_dot;
            assert!((body + body.transpose()).amax() <= 1e-14);
        }
    }

    #[test]
    fn gains_enforce_hurwitz() {
        assert!(ObserverGains::scalar(10.0).is_ok());
        assert!(matches!(
            ObserverGains::scalar(0.0),
            Err(GainError::NotHurwitz(_))
        ));
        assert!(matches!(
            ObserverGains::scalar(-1.0),
            Err(GainError::NotHurwitz(_))
        ));
        // Eigenvalues 1 ± 2i: -L is Hurwitz even though L is not symmetric.
        let l = Matrix3::new(1.0, -2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 3.0);
        assert!(ObserverGains::new(l, GRAVITY_NED).is_ok());
        // Eigenvalues 3, -1: rejected.
        let l = Matrix3::new(1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 3.0);
        assert!(ObserverGains::new(l, GRAVITY_NED).is_err());
        let mut l = Matrix3::identity();
        l[(0, 1)] = f64::NAN;
        assert_eq!(
            ObserverGains::new(l, GRAVITY_NED),
            Err(GainError::NonFinite)
        );
    }

    #[test]
    fn beta_examples() {
        let gains = ObserverGains::default();
        let design = rb_observer_design(&gains);
        let group = so3_group();
        let b = beta(&design, &group, &level(Vec3::new(1.0, 2.0, 3.0))).unwrap();
        assert_eq!(to_vec3(&b), Vec3::new(10.0, 20.0, 30.0));

        let y = Measurement {
            q: Vec3::zeros(),
            attitude: random_rotation(9),
        };
        assert_eq!(to_vec3(&beta(&design, &group, &y).unwrap()), Vec3::zeros());
    }

    #[test]
    fn beta_matches_closed_form() {
        let gains = ObserverGains::default();
        let design = rb_observer_design(&gains);
        let mut rng = rng();
        let ranges = SampleRanges::default();
        for _ in 0..200 {
            let y = ranges.measurement(&mut rng);
            let b = to_vec3(&beta(&design, &So3Action, &y).unwrap());
            assert!((b - beta_closed_form(&y, gains.l())).amax() <= 1e-12);
        }
    }

    #[test]
    fn alpha_examples() {
        let gains = ObserverGains::default();
        let design = rb_observer_design(&gains);
        let model = RigidBodyModel::default();
        let z = to_dvector(&Vec3::zeros());
        let u = RigidBodyInput::default();

        let a = alpha(&model, &design, &So3Action, &z, &level(Vec3::zeros()), &u).unwrap();
        assert_eq!(to_vec3(&a), Vec3::new(0.0, 0.0, 9.80665));

        // v̂ = Lq = (10, 0, 0); α = g − L v̂.
        let a = alpha(&model, &design, &So3Action, &z, &level(Vec3::x()), &u).unwrap();
        assert!((to_vec3(&a) - Vec3::new(-100.0, 0.0, 9.80665)).amax() <= 1e-12);
    }

    #[test]
    fn alpha_generic_matches_expanded_form() {
        let gains = ObserverGains::default();
        let design = rb_observer_design(&gains);
        let model = RigidBodyModel::default();
        let mut rng = rng();
        let ranges = SampleRanges::default();
        for _ in 0..500 {
            let z = ranges.velocity(&mut rng);
            let y = ranges.measurement(&mut rng);
            let u = ranges.input(&mut rng);
            let generic = alpha(&model, &design, &So3Action, &to_dvector(&z), &y, &u).unwrap();
            let numeric = alpha(
                &model,
                &NumericTangents(&design),
                &So3Action,
                &to_dvector(&z),
                &y,
                &u,
            )
            .unwrap();
            let closed = alpha_closed_form(&z, &y, &u, &gains);
            assert!((to_vec3(&generic) - closed).amax() <= 1e-11);
            assert!((to_vec3(&numeric) - closed).amax() <= 1e-5);
        }
    }

    #[test]
    fn reference_initial_condition_errors() {
        let gains = ObserverGains::default();
        let design = rb_observer_design(&gains);
        let y = level(Vec3::zeros());
        let v0 = to_dvector(&Vec3::new(20.0, 0.0, 0.0));
        let z0 = -beta(&design, &So3Action, &y).unwrap();
        let x_hat = estimate(&design, &So3Action, &z0, &y).unwrap();
        assert_eq!(to_vec3(&x_hat), Vec3::zeros());
        let eta = invariant_error(&design, &So3Action, &z0, &v0, &y).unwrap();
        assert_eq!(to_vec3(&eta.eta), Vec3::new(-20.0, 0.0, 0.0));
    }

    #[test]
    fn error_rhs_matches_generic() {
        let gains = ObserverGains::default();
        assert_eq!(rb_error_rhs(&Vec3::zeros(), &gains), Vec3::zeros());
        assert_eq!(rb_error_rhs(&Vec3::x(), &gains), Vec3::new(-10.0, 0.0, 0.0));

        let design = rb_observer_design(&gains);
        let model = RigidBodyModel::default();
        let mut rng = rng();
        let ranges = SampleRanges::default();
        for _ in 0..100 {
            let x = to_dvector(&ranges.velocity(&mut rng));
            let y = ranges.measurement(&mut rng);
            let u = ranges.input(&mut rng);
            let eta = ranges.velocity(&mut rng);
            let n = normalize(&design, &So3Action, &x, &y, &u).unwrap();
            let analytic =
                invariant_error_rhs(&model, &design, &So3Action, &to_dvector(&eta), &n).unwrap();
            assert!((to_vec3(&analytic) - rb_error_rhs(&eta, &gains)).amax() <= 1e-11);
        }
    }

    #[test]
    fn verifiers_accept_rigid_body() {
        let gains = ObserverGains::default();
        let design = rb_observer_design(&gains);
        let mut rng = rng();
        let ranges = SampleRanges::default();
        let tol = Tolerances::default();
        let frames = ranges.frame_samples(&mut rng, 1000);
        let report = check_frame_equivariance(&design, &So3Action, &frames, 1e-13);
        assert!(report.passed, "{report:?}");
        let systems = ranges.system_samples(&mut rng, 1000);
        let report = check_system_invariance(
            &RigidBodyModel::default(),
            &So3Action,
            &systems,
            tol.system_invariance,
        );
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn identity_frame_fails_equivariance() {
        let design = IdentityFrameDesign {
            l: Matrix3::identity() * 10.0,
        };
        let mut rng = rng();
        let frames = SampleRanges::default().frame_samples(&mut rng, 20);
        let report = check_frame_equivariance(&design, &So3Action, &frames, 1e-12);
        assert!(!report.passed);
        assert!(report.max_residual > 0.1);
    }

    #[test]
    fn group_actions_respect_identity_and_linearity() {
        let mut rng = rng();
        let ranges = SampleRanges::default();
        let e = identity_element();
        for _ in 0..100 {
            let x1 = to_dvector(&ranges.velocity(&mut rng));
            let x2 = to_dvector(&ranges.velocity(&mut rng));
            let y = ranges.measurement(&mut rng);
            let u = ranges.input(&mut rng);
            assert_eq!(So3Action.phi(&e, &x1), x1);
            assert_eq!(So3Action.rho(&e, &y), y);
            assert_eq!(So3Action.psi(&e, &u), u);
            let g = sample_rotation(&mut rng);
            let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let lhs = So3Action.phi(&g, &(&x1 * a + &x2 * b));
            let rhs = So3Action.phi(&g, &x1) * a + So3Action.phi(&g, &x2) * b;
            assert!((lhs - rhs).amax() <= 1e-12);
        }
    }
}
