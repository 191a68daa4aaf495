//! Numerical verifiers for the hypotheses the observer construction relies on.
//!
//! Each check sweeps caller-supplied samples and reports the worst residual.
//! A frame that fails to evaluate counts as an infinite residual.

use std::fmt::Write as _;

use nalgebra::DVector;

use super::{
    beta, manifold_defect_rate, tangent_beta_numeric, tangent_lambda_numeric, zero_error_state,
    GroupElement, ObserverDesign, SystemModel, TangentVector, TransformationGroup,
};

/// Pass thresholds for the built-in checks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub frame_equivariance: f64,
    pub system_invariance: f64,
    pub beta_commutation: f64,
    pub beta_tangent: f64,
    pub lambda_identity: f64,
    pub zero_error_manifold: f64,
    pub alpha_formula: f64,
    pub error_system: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            frame_equivariance: 1e-12,
            system_invariance: 1e-11,
            beta_commutation: 1e-12,
            beta_tangent: 1e-6,
            lambda_identity: 1e-6,
            zero_error_manifold: 1e-12,
            alpha_formula: 1e-11,
            error_system: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Per-identity maxima when a check covers more than one identity.
    pub parts: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            // NaN residuals fail.
            passed: max_residual <= tolerance,
            parts: Vec::new(),
        }
    }

    fn with_parts(mut self, parts: Vec<(String, f64)>) -> Self {
        self.parts = parts;
        self
    }
}

/// Ordered collection of check results.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckReport>,
}

impl VerificationReport {
    pub fn push(&mut self, report: CheckReport) {
        self.checks.push(report);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckReport> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub const CSV_HEADER: &'static str = "check,samples,max_residual,tolerance,passed";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{:.6e},{:.1e},{}",
                c.name,
                c.samples,
                c.max_residual,
                c.tolerance,
                if c.passed { "pass" } else { "fail" }
            );
        }
        out
    }
}

/// Group element and measurement.
#[derive(Debug, Clone)]
pub struct FrameSample<A: TransformationGroup> {
    pub g: A::Group,
    pub y: A::Measured,
}

/// Group element with a full `(x, y, u)` point.
#[derive(Debug, Clone)]
pub struct SystemSample<A: TransformationGroup> {
    pub g: A::Group,
    pub x: DVector<f64>,
    pub y: A::Measured,
    pub u: A::Input,
}

/// [`SystemSample`] plus the constant `ζ` of the λ identity.
#[derive(Debug, Clone)]
pub struct LambdaSample<A: TransformationGroup> {
    pub g: A::Group,
    pub zeta: DVector<f64>,
    pub x: DVector<f64>,
    pub y: A::Measured,
    pub u: A::Input,
}

fn worst(acc: f64, r: f64) -> f64 {
    if r.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(r)
    }
}

/// `γ(ϱ_g(y)) ∗ g = γ(y)`.
pub fn check_frame_equivariance<A, D>(
    design: &D,
    group: &A,
    samples: &[FrameSample<A>],
    tolerance: f64,
) -> CheckReport
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    let max = samples.iter().fold(0.0, |acc, s| {
        let r = match (design.frame(&group.rho(&s.g, &s.y)), design.frame(&s.y)) {
            (Ok(moved), Ok(base)) => moved.compose(&s.g).distance(&base),
            _ => f64::INFINITY,
        };
        worst(acc, r)
    });
    CheckReport::new("frame_equivariance", samples.len(), max, tolerance)
}

/// `T_xφ_g(f(x,y,u)) = f(φ_g x, ϱ_g y, ψ_g u)` and
/// `T_yϱ_g(h(x,y,u)) = h(φ_g x, ϱ_g y, ψ_g u)`.
pub fn check_system_invariance<A, M>(
    model: &M,
    group: &A,
    samples: &[SystemSample<A>],
    tolerance: f64,
) -> CheckReport
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
{
    let mut f_max = 0.0;
    let mut h_max = 0.0;
    for s in samples {
        let gx = group.phi(&s.g, &s.x);
        let gy = group.rho(&s.g, &s.y);
        let gu = group.psi(&s.g, &s.u);
        let f_lhs = group.phi(&s.g, &model.f(&s.x, &s.y, &s.u));
        let f_rhs = model.f(&gx, &gy, &gu);
        f_max = worst(f_max, (f_lhs - f_rhs).norm());
        let h_lhs = group.tangent_rho(&s.g, &s.y, &model.h(&s.x, &s.y, &s.u));
        let h_rhs = model.h(&gx, &gy, &gu);
        h_max = worst(h_max, (h_lhs - h_rhs).norm());
    }
    CheckReport::new(
        "system_invariance",
        samples.len(),
        worst(f_max, h_max),
        tolerance,
    )
    .with_parts(vec![("f".into(), f_max), ("h".into(), h_max)])
}

/// `β(ϱ_g(y)) = φ_g(β(y))`.
pub fn check_beta_commutation<A, D>(
    design: &D,
    group: &A,
    samples: &[FrameSample<A>],
    tolerance: f64,
) -> CheckReport
where
    A: TransformationGroup,
    D: ObserverDesign<A> + ?Sized,
{
    let max = samples.iter().fold(0.0, |acc, s| {
        let r = match (
            beta(design, group, &group.rho(&s.g, &s.y)),
            beta(design, group, &s.y),
        ) {
            (Ok(moved), Ok(base)) => (moved - group.phi(&s.g, &base)).norm(),
            _ => f64::INFINITY,
        };
        worst(acc, r)
    });
    CheckReport::new("beta_commutation", samples.len(), max, tolerance)
}

/// `T_{ϱ_g y}β ∘ T_yϱ_g = T_{β(y)}φ_g ∘ T_yβ`, applied to `h(x, y, u)`.
///
/// Both tangent maps of `β` are taken by finite differences.
pub fn check_beta_tangent_identity<A, M, D>(
    model: &M,
    design: &D,
    group: &A,
    samples: &[SystemSample<A>],
    tolerance: f64,
) -> CheckReport
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
    D: ObserverDesign<A> + ?Sized,
{
    let max = samples.iter().fold(0.0, |acc, s| {
        let y_dot = model.h(&s.x, &s.y, &s.u);
        let moved_y = group.rho(&s.g, &s.y);
        let moved_dot = group.tangent_rho(&s.g, &s.y, &y_dot);
        let lhs = tangent_beta_numeric(design, group, &moved_y, &moved_dot);
        let rhs = tangent_beta_numeric(design, group, &s.y, &y_dot).map(|t| group.phi(&s.g, &t));
        let r = match (lhs, rhs) {
            (Ok(l), Ok(r)) => (l - r).norm(),
            _ => f64::INFINITY,
        };
        worst(acc, r)
    });
    CheckReport::new("beta_tangent_identity", samples.len(), max, tolerance)
}

/// `T_{(y; φ_{g⁻¹}ζ)}λ(h(x,y,u)) = T_{(ϱ_g y; ζ)}λ(h(φ_g x, ϱ_g y, ψ_g u))`.
pub fn check_lambda_identity<A, M, D>(
    model: &M,
    design: &D,
    group: &A,
    samples: &[LambdaSample<A>],
    tolerance: f64,
) -> CheckReport
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
    D: ObserverDesign<A> + ?Sized,
{
    let max = samples.iter().fold(0.0, |acc, s| {
        let pulled = group.phi(&s.g.inverse(), &s.zeta);
        let lhs = tangent_lambda_numeric(design, group, &s.y, &pulled, &model.h(&s.x, &s.y, &s.u));
        let gx = group.phi(&s.g, &s.x);
        let gy = group.rho(&s.g, &s.y);
        let gu = group.psi(&s.g, &s.u);
        let rhs = tangent_lambda_numeric(design, group, &gy, &s.zeta, &model.h(&gx, &gy, &gu));
        let r = match (lhs, rhs) {
            (Ok(l), Ok(r)) => (l - r).norm(),
            _ => f64::INFINITY,
        };
        worst(acc, r)
    });
    CheckReport::new("lambda_identity", samples.len(), max, tolerance)
}

/// The zero-error manifold `z = x − β(y)` is carried into itself by the flow.
pub fn check_zero_error_invariance<A, M, D>(
    model: &M,
    design: &D,
    group: &A,
    samples: &[SystemSample<A>],
    tolerance: f64,
) -> CheckReport
where
    A: TransformationGroup,
    M: SystemModel<A> + ?Sized,
    D: ObserverDesign<A> + ?Sized,
{
    let max = samples.iter().fold(0.0, |acc, s| {
        let r = zero_error_state(design, group, &s.x, &s.y)
            .and_then(|z| manifold_defect_rate(model, design, group, &z, &s.x, &s.y, &s.u))
            .map_or(f64::INFINITY, |d| d.norm());
        worst(acc, r)
    });
    CheckReport::new("zero_error_manifold", samples.len(), max, tolerance)
}
