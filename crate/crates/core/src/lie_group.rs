//! SO(3) primitives on full 3×3 rotation matrices.
//!
//! Rotations are kept as direction-cosine matrices rather than quaternions so
//! the observer formulas (`Rᵀ L q`, `R ⌊ω⌋`) can be written down directly.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Three-vector used for positions, velocities, rates and errors.
pub type Vec3 = Vector3<f64>;

/// Below this angle `exp_so3` switches to its Taylor expansion.
pub const SMALL_ANGLE: f64 = 1.0e-4;

/// Largest `‖M + Mᵀ‖_F` accepted by [`vee`].
pub const SKEW_TOLERANCE: f64 = 1.0e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieError {
    #[error("matrix is not skew-symmetric (|M + M^T|_F = {0:e})")]
    NotSkew(f64),
    #[error("matrix cannot be projected onto SO(3): {0}")]
    Degenerate(&'static str),
}

/// Element of SO(3), stored as a rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps `m` without checking orthonormality.
    ///
    /// Intended for intermediate integrator stages, where the matrix is close
    /// to but not exactly on SO(3). Anything stored long-term should go
    /// through [`project_to_so3`] instead.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    /// Builds a rotation from row-major entries, projecting onto SO(3).
    pub fn from_row_slice(entries: &[f64; 9]) -> Result<Self, LieError> {
        project_to_so3(&Matrix3::from_row_slice(entries))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Matrix3<f64> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Row-major entries `R_11, R_12, ..., R_33`.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    /// `‖RᵀR − I‖_F`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Frobenius distance between two rotations.
    pub fn distance(&self, other: &Rotation) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// Skew-symmetric matrix with `hat(w) * b == w × b`.
pub fn hat(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat`].
pub fn vee(m: &Matrix3<f64>) -> Result<Vec3, LieError> {
    let asym = (m + m.transpose()).norm();
    if asym.is_nan() || asym > SKEW_TOLERANCE {
        return Err(LieError::NotSkew(asym));
    }
    Ok(vee_of_skew_part(m))
}

/// `vee` of the skew-symmetric part `(M − Mᵀ)/2`, with no precondition.
pub fn vee_of_skew_part(m: &Matrix3<f64>) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Exponential map so(3) → SO(3) (Rodrigues' formula).
pub fn exp_so3(w: &Vec3) -> Rotation {
    let theta_sq = w.norm_squared();
    let theta = theta_sq.sqrt();
    let (a, b) = if theta < SMALL_ANGLE {
        (1.0 - theta_sq / 6.0, 0.5 - theta_sq / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta_sq)
    };
    let k = hat(w);
    Rotation(Matrix3::identity() + k * a + k * k * b)
}

pub fn compose(g: &Rotation, h: &Rotation) -> Rotation {
    Rotation(g.0 * h.0)
}

pub fn inverse(g: &Rotation) -> Rotation {
    g.transpose()
}

pub fn act(g: &Rotation, v: &Vec3) -> Vec3 {
    g.0 * v
}

/// Nearest rotation to `m` in the Frobenius norm (orthogonal polar factor).
pub fn project_to_so3(m: &Matrix3<f64>) -> Result<Rotation, LieError> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(LieError::Degenerate("non-finite entries"));
    }
    let det = m.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(LieError::Degenerate("determinant is not positive"));
    }
    let svd = m.svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    if s_min <= 1.0e-12 * s_max {
        return Err(LieError::Degenerate("matrix is nearly rank-deficient"));
    }
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(LieError::Degenerate("singular value decomposition failed"));
    };
    let mut r = u * v_t;
    // One Newton step on the polar iteration tightens orthonormality to round-off.
    if let Some(inv) = r.try_inverse() {
        r = 0.5 * (r + inv.transpose());
    }
    Ok(Rotation(r))
}

/// Haar-uniform rotation drawn from `rng`.
///
/// The axis is uniform on the sphere. The angle is drawn from the Haar
/// marginal density `(1 − cos θ)/π` on `[0, π]` by rejection.
pub fn sample_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let axis = loop {
        let c = Vec3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        let n = c.norm();
        if n > 1.0e-6 && n <= 1.0 {
            break c / n;
        }
    };
    let angle = loop {
        let theta: f64 = rng.random_range(0.0..=std::f64::consts::PI);
        let accept: f64 = rng.random_range(0.0..1.0);
        if 2.0 * accept <= 1.0 - theta.cos() {
            break theta;
        }
    };
    exp_so3(&(axis * angle))
}

/// Deterministic Haar-uniform rotation for a given seed.
pub fn random_rotation(seed: u64) -> Rotation {
    sample_rotation(&mut ChaCha8Rng::seed_from_u64(seed))
}
