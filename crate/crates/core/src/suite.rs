//! The registered verification checks for the rigid-body instance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rigid_body::{
    alpha_closed_form, rb_error_rhs, rb_observer_design, to_dvector, to_vec3, IdentityFrameDesign,
    ObserverGains, RigidBodyModel, SampleRanges, So3Action,
};
use crate::symmetry::{
    alpha, check_beta_commutation, check_beta_tangent_identity, check_frame_equivariance,
    check_lambda_identity, check_system_invariance, check_zero_error_invariance,
    invariant_error_rhs, normalize, CheckReport, NumericTangents, ObserverDesign, Tolerances,
    VerificationReport,
};

/// Check names in report order.
pub const CHECK_NAMES: [&str; 8] = [
    "frame_equivariance",
    "system_invariance",
    "beta_commutation",
    "beta_tangent_identity",
    "lambda_identity",
    "zero_error_manifold",
    "alpha_formula",
    "error_system",
];

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    /// Samples per check, except `error_system`.
    pub samples: usize,
    /// Samples for `error_system`.
    pub error_samples: usize,
    pub seed: u64,
    pub ranges: SampleRanges,
    pub tolerances: Tolerances,
    /// Replace the moving frame with the non-equivariant identity frame.
    pub inject_bad_frame: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            error_samples: 500,
            seed: 0,
            ranges: SampleRanges::default(),
            tolerances: Tolerances::default(),
            inject_bad_frame: false,
        }
    }
}

/// Each check draws from its own stream so adding samples to one check
/// leaves the others unchanged.
fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Generic `α` against the expanded closed form.
pub fn check_alpha_formula(
    gains: &ObserverGains,
    design: &dyn ObserverDesign<So3Action>,
    ranges: &SampleRanges,
    rng: &mut ChaCha8Rng,
    samples: usize,
    tolerance: f64,
) -> CheckReport {
    let model = RigidBodyModel {
        gravity: *gains.gravity(),
    };
    let mut max: f64 = 0.0;
    for _ in 0..samples {
        let z = ranges.velocity(rng);
        let y = ranges.measurement(rng);
        let u = ranges.input(rng);
        let r = match alpha(&model, design, &So3Action, &to_dvector(&z), &y, &u) {
            Ok(a) => (to_vec3(&a) - alpha_closed_form(&z, &y, &u, gains)).norm(),
            Err(_) => f64::INFINITY,
        };
        max = if r.is_nan() { f64::NAN } else { max.max(r) };
    }
    CheckReport::new("alpha_formula", samples, max, tolerance)
}

/// Generic invariant error system, with finite-difference tangents, against
/// `η̇ = −Lη` at moving-frame-normalized points.
pub fn check_error_system(
    gains: &ObserverGains,
    design: &dyn ObserverDesign<So3Action>,
    ranges: &SampleRanges,
    rng: &mut ChaCha8Rng,
    samples: usize,
    tolerance: f64,
) -> CheckReport {
    let model = RigidBodyModel {
        gravity: *gains.gravity(),
    };
    let numeric = NumericTangents(design);
    let mut max: f64 = 0.0;
    for _ in 0..samples {
        let x = to_dvector(&ranges.velocity(rng));
        let y = ranges.measurement(rng);
        let u = ranges.input(rng);
        let eta = ranges.velocity(rng);
        let r = normalize(design, &So3Action, &x, &y, &u)
            .and_then(|n| invariant_error_rhs(&model, &numeric, &So3Action, &to_dvector(&eta), &n))
            .map_or(f64::INFINITY, |rhs| {
                (to_vec3(&rhs) - rb_error_rhs(&eta, gains)).norm()
            });
        max = if r.is_nan() { f64::NAN } else { max.max(r) };
    }
    CheckReport::new("error_system", samples, max, tolerance)
}

/// Runs every registered check, in [`CHECK_NAMES`] order.
pub fn run_suite(gains: &ObserverGains, options: &SuiteOptions) -> VerificationReport {
    let model = RigidBodyModel {
        gravity: *gains.gravity(),
    };
    let good = rb_observer_design(gains);
    let bad = IdentityFrameDesign { l: *gains.l() };
    let design: &dyn ObserverDesign<So3Action> = if options.inject_bad_frame {
        &bad
    } else {
        &good
    };
    let (n, ranges, tol) = (options.samples, &options.ranges, &options.tolerances);
    let seed = options.seed;

    let mut report = VerificationReport::default();
    let frames = ranges.frame_samples(&mut stream(seed, 0), n);
    report.push(check_frame_equivariance(
        design,
        &So3Action,
        &frames,
        tol.frame_equivariance,
    ));
    let systems = ranges.system_samples(&mut stream(seed, 1), n);
    report.push(check_system_invariance(
        &model,
        &So3Action,
        &systems,
        tol.system_invariance,
    ));
    let frames = ranges.frame_samples(&mut stream(seed, 2), n);
    report.push(check_beta_commutation(
        design,
        &So3Action,
        &frames,
        tol.beta_commutation,
    ));
    let systems = ranges.system_samples(&mut stream(seed, 3), n);
    report.push(check_beta_tangent_identity(
        &model,
        design,
        &So3Action,
        &systems,
        tol.beta_tangent,
    ));
    let lambdas = ranges.lambda_samples(&mut stream(seed, 4), n);
    report.push(check_lambda_identity(
        &model,
        design,
        &So3Action,
        &lambdas,
        tol.lambda_identity,
    ));
    let systems = ranges.system_samples(&mut stream(seed, 5), n);
    report.push(check_zero_error_invariance(
        &model,
        design,
        &So3Action,
        &systems,
        tol.zero_error_manifold,
    ));
    report.push(check_alpha_formula(
        gains,
        design,
        ranges,
        &mut stream(seed, 6),
        n,
        tol.alpha_formula,
    ));
    report.push(check_error_system(
        gains,
        design,
        ranges,
        &mut stream(seed, 7),
        options.error_samples,
        tol.error_system,
    ));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_instance_passes_every_check() {
        let report = run_suite(&ObserverGains::default(), &SuiteOptions::default());
        let names: Vec<_> = report.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, CHECK_NAMES);
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn bad_frame_fails_frame_equivariance_first() {
        let options = SuiteOptions {
            samples: 50,
            error_samples: 50,
            inject_bad_frame: true,
            ..SuiteOptions::default()
        };
        let report = run_suite(&ObserverGains::default(), &options);
        assert_eq!(report.first_failure().unwrap().name, "frame_equivariance");
        // System invariance does not depend on the design.
        assert!(report.checks[1].passed);
    }

    #[test]
    fn suite_is_deterministic() {
        let options = SuiteOptions {
            samples: 30,
            error_samples: 30,
            seed: 9,
            ..SuiteOptions::default()
        };
        let gains = ObserverGains::default();
        assert_eq!(
            run_suite(&gains, &options).to_csv(),
            run_suite(&gains, &options).to_csv()
        );
    }
}
