//! Summary statistics of a recorded run.

use crate::lie_group::Vec3;

use super::record::TrajectoryRecord;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("no samples in metrics window [{start}, {end}]")]
    EmptyWindow { start: f64, end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsOptions {
    /// Start of the RMSE window; also the end of the transient [s].
    pub window_start: f64,
    /// End of the RMSE window; `None` runs to the last sample [s].
    pub window_end: Option<f64>,
    /// The decay fit stops once `‖η‖` falls below this fraction of `‖η(0)‖`.
    pub floor_ratio: f64,
    /// Absolute floor for the decay fit.
    pub floor_abs: f64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self {
            window_start: 1.0,
            window_end: None,
            floor_ratio: 1.0e-6,
            floor_abs: 1.0e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSummary {
    /// Per-axis RMSE of `v̂ − v` over the window [m/s].
    pub rmse: Vec3,
    /// RMS of `‖v̂ − v‖` over the window [m/s].
    pub rmse_norm: f64,
    /// Least-squares decay rate of `‖η‖` [1/s], if at least two samples lie
    /// above the noise floor.
    pub decay_rate: Option<f64>,
    /// Largest `‖η‖` inside the window.
    pub max_eta_after_transient: f64,
    pub window_samples: usize,
}

/// Ordinary least-squares line with the standard error of its slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Fits `y ≈ intercept + slope·x`. Needs at least two distinct `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..n {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse: f64 = (0..n)
            .map(|i| {
                let r = y[i] - intercept - slope * x[i];
                r * r
            })
            .sum();
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Decay rate of `‖η(t)‖` from a log-linear least-squares fit.
pub fn fit_decay_rate(record: &TrajectoryRecord, options: &MetricsOptions) -> Option<f64> {
    let first = record.samples.first()?;
    let floor = (options.floor_ratio * first.eta.norm()).max(options.floor_abs);
    let (t, log_eta): (Vec<f64>, Vec<f64>) = record
        .samples
        .iter()
        .map(|s| (s.t, s.eta.norm()))
        .take_while(|(_, e)| *e >= floor && *e > 0.0)
        .map(|(t, e)| (t, e.ln()))
        .unzip();
    linear_fit(&t, &log_eta).map(|fit| -fit.slope)
}

pub fn metrics(
    record: &TrajectoryRecord,
    options: &MetricsOptions,
) -> Result<MetricsSummary, MetricsError> {
    let end = options
        .window_end
        .or_else(|| record.samples.last().map(|s| s.t))
        .unwrap_or(options.window_start);
    let window: Vec<_> = record
        .samples
        .iter()
        .filter(|s| s.t >= options.window_start && s.t <= end)
        .collect();
    if window.is_empty() {
        return Err(MetricsError::EmptyWindow {
            start: options.window_start,
            end,
        });
    }
    let n = window.len() as f64;
    let mut sq = Vec3::zeros();
    let mut max_eta: f64 = 0.0;
    for s in &window {
        let e = s.v_hat - s.v;
        sq += e.component_mul(&e);
        max_eta = max_eta.max(s.eta.norm());
    }
    let mean_sq = sq / n;
    Ok(MetricsSummary {
        rmse: mean_sq.map(f64::sqrt),
        rmse_norm: mean_sq.sum().sqrt(),
        decay_rate: fit_decay_rate(record, options),
        max_eta_after_transient: max_eta,
        window_samples: window.len(),
    })
}
