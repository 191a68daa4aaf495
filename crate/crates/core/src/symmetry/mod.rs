//! Generic machinery for G-invariant reduced-order observers.
//!
//! A system splits its state into an unmeasured part `x ∈ ℝⁿ` and a measured
//! part `y` living on a manifold, driven by a known input `u`:
//!
//! ```text
//! ẋ = f(x, y, u)
//! ẏ = h(x, y, u)
//! ```
//!
//! A Lie group acts on all three through `φ_g`, `ϱ_g` and `ψ_g`, with `φ_g`
//! linear. Given a moving frame `γ: Y → G` and a tuning map `ℓ: Y → X`, the
//! observer map is
//!
//! ```text
//! β(y) = φ_{γ(y)⁻¹}( ℓ(ϱ_{γ(y)}(y)) )
//! ```
//!
//! and the observer `ż = α(z, y, u)` with output `x̂ = z + β(y)` uses
//!
//! ```text
//! α(z, y, u) = f(z + β(y), y, u) − T_yβ( h(z + β(y), y, u) ).
//! ```
//!
//! Tangent maps of `β` and of `λ(y; ξ) = φ_{γ(y)}(ξ)` may be supplied in
//! closed form by an [`ObserverDesign`]; otherwise they are evaluated by
//! central differences in the local chart exposed by [`MeasuredSpace`].

use nalgebra::DVector;

use crate::lie_group::{compose, inverse, Rotation};

pub mod verify;

pub use verify::{
    check_beta_commutation, check_beta_tangent_identity, check_frame_equivariance,
    check_lambda_identity, check_system_invariance, check_zero_error_invariance, CheckReport,
    FrameSample, LambdaSample, SystemSample, Tolerances, VerificationReport,
};

/// Relative step used by the finite-difference tangent maps.
pub const FD_STEP: f64 = 1.0e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("moving frame undefined at this measurement: {0}")]
    FrameUndefined(String),
}

/// Group structure used by the generic layer.
pub trait GroupElement: Clone {
    fn identity() -> Self;
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// Metric used by the equivariance checks.
    fn distance(&self, other: &Self) -> f64;
}

impl GroupElement for Rotation {
    fn identity() -> Self {
        Rotation::identity()
    }

    fn compose(&self, other: &Self) -> Self {
        compose(self, other)
    }

    fn inverse(&self) -> Self {
        inverse(self)
    }

    fn distance(&self, other: &Self) -> f64 {
        Rotation::distance(self, other)
    }
}

/// Tangent vectors of the measured space.
pub trait TangentVector: Clone + std::ops::Sub<Output = Self> {
    fn norm(&self) -> f64;
}

/// Measured state together with a local chart for finite differences.
pub trait MeasuredSpace: Clone {
    type Tangent: TangentVector;

    /// Intrinsic dimension of the chart.
    fn dof(&self) -> usize;

    /// Moves `step` along chart direction `direction`.
    fn perturb(&self, direction: usize, step: f64) -> Self;

    /// Magnitude of the coordinate in `direction`, used to scale the step.
    fn coordinate_scale(&self, direction: usize) -> f64;

    /// Components of `tangent` in the chart at `self`.
    fn tangent_coordinates(&self, tangent: &Self::Tangent) -> DVector<f64>;
}

/// Transformation group acting on `(x, y, u)`.
///
/// `phi` must be linear in `x`, so its tangent map is `phi` itself.
pub trait TransformationGroup {
    type Group: GroupElement;
    type Measured: MeasuredSpace;
    type Input: Clone;

    fn phi(&self, g: &Self::Group, x: &DVector<f64>) -> DVector<f64>;
    fn rho(&self, g: &Self::Group, y: &Self::Measured) -> Self::Measured;
    fn psi(&self, g: &Self::Group, u: &Self::Input) -> Self::Input;
    /// `T_y ϱ_g` applied to `y_dot`.
    fn tangent_rho(
        &self,
        g: &Self::Group,
        y: &Self::Measured,
        y_dot: &<Self::Measured as MeasuredSpace>::Tangent,
    ) -> <Self::Measured as MeasuredSpace>::Tangent;
}

/// Measured/unmeasured dynamics `ẋ = f`, `ẏ = h`.
pub trait SystemModel<A: TransformationGroup> {
    fn dim_x(&self) -> usize;
    fn f(&self, x: &DVector<f64>, y: &A::Measured, u: &A::Input) -> DVector<f64>;
    fn h(
        &self,
        x: &DVector<f64>,
        y: &A::Measured,
        u: &A::Input,
    ) -> <A::Measured as MeasuredSpace>::Tangent;
}

/// Moving frame, tuning map, and optional closed-form tangent maps.
pub trait ObserverDesign<A: TransformationGroup> {
    /// Moving frame `γ(y)`.
    fn frame(&self, y: &A::Measured) -> Result<A::Group, FrameError>;

    /// Tuning map `ℓ(y)`.
    fn ell(&self, y: &A::Measured) -> DVector<f64>;

    /// Closed-form `T_yβ(y_dot)`, if known.
    fn tangent_beta(
        &self,
        _y: &A::Measured,
        _y_dot: &<A::Measured as MeasuredSpace>::Tangent,
    ) -> Option<DVector<f64>> {
        None
    }

    /// Closed-form `T_{(y; ξ)}λ(y_dot)`, if known.
    fn tangent_lambda(
        &self,
        _y: &A::Measured,
        _xi: &DVector<f64>,
        _y_dot: &<A::Measured as MeasuredSpace>::Tangent,
    ) -> Option<DVector<f64>> {
        None
    }
}

/// Hides any closed-form tangents so every tangent map goes through
/// finite differences.
pub struct NumericTangents<'a, D: ?Sized>(pub &'a D);

impl<A: TransformationGroup, D: ObserverDesign<A> + ?Sized> ObserverDesign<A>
    for NumericTangents<'_, D>
{
    fn frame(&self, y: &A::Measured) -> Result<A::Group, FrameError> {
        self.0.frame(y)
    }

    fn ell(&self, y: &A::Measured) -> DVector<f64> {
        self.0.ell(y)
    }
}

/// Moving-frame normalized invariants `X = φ_γ(x)`, `Y = ϱ_γ(y)`, `U = ψ_γ(u)`.
#[derive(Debug, Clone)]
pub struct Normalized<A: TransformationGroup> {
    pub x: DVector<f64>,
    pub y: A::Measured,
    pub u: A::Input,
}

/// `β(y) = φ_{γ(y)⁻¹}(ℓ(ϱ_{γ(y)}(y)))`.
pub fn beta<A, D>(design: &D, group: &A, y: &A::Measured) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    let gamma = design.frame(y)?;
    let normalized = group.rho(&gamma, y);
    Ok(group.phi(&gamma.inverse(), &design.ell(&normalized)))
}

/// Central-difference Jacobian of `map` in the chart of `y`, applied to `y_dot`.
pub fn directional_derivative<Y, F>(
    y: &Y,
    y_dot: &Y::Tangent,
    mut map: F,
) -> Result<DVector<f64>, FrameError>
where
    Y: MeasuredSpace,
    F: FnMut(&Y) -> Result<DVector<f64>, FrameError>,
{
    let coords = y.tangent_coordinates(y_dot);
    let mut out: Option<DVector<f64>> = None;
    for i in 0..y.dof() {
        let c = coords[i];
        if c == 0.0 {
            continue;
        }
        let step = FD_STEP * y.coordinate_scale(i).abs().max(1.0);
        let plus = map(&y.perturb(i, step))?;
        let minus = map(&y.perturb(i, -step))?;
        let column = (plus - minus) * (c / (2.0 * step));
        out = Some(match out {
            Some(acc) => acc + column,
            None => column,
        });
    }
    match out {
        Some(v) => Ok(v),
        // Zero tangent: evaluate once just to learn the output dimension.
        None => Ok(map(y)? * 0.0),
    }
}

/// `T_yβ(y_dot)` by finite differences.
pub fn tangent_beta_numeric<A, D>(
    design: &D,
    group: &A,
    y: &A::Measured,
    y_dot: &<A::Measured as MeasuredSpace>::Tangent,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    directional_derivative(y, y_dot, |p| beta(design, group, p))
}

/// `T_yβ(y_dot)`, closed form when the design registers one.
pub fn tangent_beta<A, D>(
    design: &D,
    group: &A,
    y: &A::Measured,
    y_dot: &<A::Measured as MeasuredSpace>::Tangent,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    match design.tangent_beta(y, y_dot) {
        Some(v) => Ok(v),
        None => tangent_beta_numeric(design, group, y, y_dot),
    }
}

/// `λ(y; ξ) = φ_{γ(y)}(ξ)`.
pub fn lambda<A, D>(
    design: &D,
    group: &A,
    y: &A::Measured,
    xi: &DVector<f64>,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    Ok(group.phi(&design.frame(y)?, xi))
}

/// `T_{(y; ξ)}λ(y_dot)` by finite differences in the `y` slot.
pub fn tangent_lambda_numeric<A, D>(
    design: &D,
    group: &A,
    y: &A::Measured,
    xi: &DVector<f64>,
    y_dot: &<A::Measured as MeasuredSpace>::Tangent,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    directional_derivative(y, y_dot, |p| lambda(design, group, p, xi))
}

/// `T_{(y; ξ)}λ(y_dot)`, closed form when the design registers one.
pub fn tangent_lambda<A, D>(
    design: &D,
    group: &A,
    y: &A::Measured,
    xi: &DVector<f64>,
    y_dot: &<A::Measured as MeasuredSpace>::Tangent,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    match design.tangent_lambda(y, xi, y_dot) {
        Some(v) => Ok(v),
        None => tangent_lambda_numeric(design, group, y, xi, y_dot),
    }
}

/// Pre-observer vector field `α(z, y, u)`.
pub fn alpha<A, M, D>(
    model: &M,
    design: &D,
    group: &A,
    z: &DVector<f64>,
    y: &A::Measured,
    u: &A::Input,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
    D: ObserverDesign<A> + ?Sized,
{
    let x_hat = z + beta(design, group, y)?;
    let drift = model.f(&x_hat, y, u);
    let y_dot = model.h(&x_hat, y, u);
    Ok(drift - tangent_beta(design, group, y, &y_dot)?)
}

/// Observer output `x̂ = z + β(y)`.
pub fn estimate<A, D>(
    design: &D,
    group: &A,
    z: &DVector<f64>,
    y: &A::Measured,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    Ok(z + beta(design, group, y)?)
}

/// Observer state that places `(z, x, y)` on the zero-error manifold.
pub fn zero_error_state<A, D>(
    design: &D,
    group: &A,
    x: &DVector<f64>,
    y: &A::Measured,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    Ok(x - beta(design, group, y)?)
}

/// Invariant error coordinates, zero exactly on the zero-error manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantError {
    pub eta: DVector<f64>,
}

impl InvariantError {
    pub fn norm(&self) -> f64 {
        self.eta.norm()
    }
}

/// `η = φ_{γ(y)}(z) + ℓ(ϱ_{γ(y)}(y)) − φ_{γ(y)}(x)`.
pub fn invariant_error<A, D>(
    design: &D,
    group: &A,
    z: &DVector<f64>,
    x: &DVector<f64>,
    y: &A::Measured,
) -> Result<InvariantError, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    let gamma = design.frame(y)?;
    let normalized = group.rho(&gamma, y);
    let eta = group.phi(&gamma, z) + design.ell(&normalized) - group.phi(&gamma, x);
    Ok(InvariantError { eta })
}

/// Moving-frame normalization of `(x, y, u)`.
pub fn normalize<A, D>(
    design: &D,
    group: &A,
    x: &DVector<f64>,
    y: &A::Measured,
    u: &A::Input,
) -> Result<Normalized<A>, FrameError>
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    let gamma = design.frame(y)?;
    Ok(Normalized {
        x: group.phi(&gamma, x),
        y: group.rho(&gamma, y),
        u: group.psi(&gamma, u),
    })
}

/// Right-hand side of the invariant error system:
///
/// ```text
/// η̇ = f(X+η, Y, U) − f(X, Y, U)
///      − T_Yβ( h(X+η, Y, U) − h(X, Y, U) )
///      + T_{(Y; η)}λ( h(X, Y, U) )
/// ```
///
/// `normalized` must already be moving-frame normalized.
pub fn invariant_error_rhs<A, M, D>(
    model: &M,
    design: &D,
    group: &A,
    eta: &DVector<f64>,
    normalized: &Normalized<A>,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
    D: ObserverDesign<A> + ?Sized,
{
    let Normalized { x, y, u } = normalized;
    let shifted = x + eta;
    let drift = model.f(&shifted, y, u) - model.f(x, y, u);
    let y_dot = model.h(x, y, u);
    let dh = model.h(&shifted, y, u) - y_dot.clone();
    let coupling = tangent_beta(design, group, y, &dh)?;
    let frame_rate = tangent_lambda(design, group, y, eta, &y_dot)?;
    Ok(drift - coupling + frame_rate)
}

/// `d/dt (z − x + β(y))` along the coupled plant/observer flow.
///
/// Vanishes identically when `z = x − β(y)`.
pub fn manifold_defect_rate<A, M, D>(
    model: &M,
    design: &D,
    group: &A,
    z: &DVector<f64>,
    x: &DVector<f64>,
    y: &A::Measured,
    u: &A::Input,
) -> Result<DVector<f64>, FrameError>
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
    D: ObserverDesign<A> + ?Sized,
{
    let z_dot = alpha(model, design, group, z, y, u)?;
    let y_dot = model.h(x, y, u);
    Ok(z_dot - model.f(x, y, u) + tangent_beta(design, group, y, &y_dot)?)
}
