//! Static SVG plot of true and estimated body velocity.

use std::fmt::Write as _;

use invobs_core::simulation::TrajectoryRecord;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 200.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const GAP: f64 = 40.0;
const MAX_POINTS: usize = 2000;

const TRUTH: &str = "#1f77b4";
const ESTIMATE: &str = "#d62728";

/// Three stacked panels, one per body axis, truth solid and estimate dashed.
pub fn velocity_svg(record: &TrajectoryRecord) -> String {
    let height = MARGIN_TOP + 3.0 * PANEL_HEIGHT + 3.0 * GAP;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN_LEFT}" y="18"><tspan fill="{TRUTH}">― v (truth)</tspan>  <tspan fill="{ESTIMATE}">- - v̂ (estimate)</tspan></text>"#
    );

    let samples = &record.samples;
    if samples.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let stride = samples.len().div_ceil(MAX_POINTS).max(1);
    let picked: Vec<_> = samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == samples.len() - 1)
        .map(|(_, s)| s)
        .collect();
    let t0 = samples[0].t;
    let t1 = samples[samples.len() - 1].t;
    let t_span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;

    for axis in 0..3 {
        let top = MARGIN_TOP + axis as f64 * (PANEL_HEIGHT + GAP);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &picked {
            for value in [s.v[axis], s.v_hat[axis]] {
                if value.is_finite() {
                    lo = lo.min(value);
                    hi = hi.max(value);
                }
            }
        }
        if !lo.is_finite() {
            (lo, hi) = (-1.0, 1.0);
        }
        let pad = ((hi - lo) * 0.05).max(1e-3);
        let (lo, hi) = (lo - pad, hi + pad);
        let x_of = |t: f64| MARGIN_LEFT + (t - t0) / t_span * plot_width;
        let y_of = |v: f64| top + (hi - v) / (hi - lo) * PANEL_HEIGHT;

        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_width}" height="{PANEL_HEIGHT}" fill="none" stroke="#444"/>"##
        );
        let label = ["v_x", "v_y", "v_z"][axis];
        let _ = writeln!(
            svg,
            r#"<text x="12" y="{:.1}">{label} [m/s]</text>"#,
            top + PANEL_HEIGHT / 2.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{hi:.3}</text>"#,
            MARGIN_LEFT - 4.0,
            top + 10.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{lo:.3}</text>"#,
            MARGIN_LEFT - 4.0,
            top + PANEL_HEIGHT
        );
        let bottom = top + PANEL_HEIGHT + 14.0;
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN_LEFT}" y="{bottom:.1}">{t0:.2} s</text>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{bottom:.1}" text-anchor="end">{t1:.2} s</text>"#,
            WIDTH - MARGIN_RIGHT
        );

        for (series, color, dash) in [(0, TRUTH, ""), (1, ESTIMATE, r#" stroke-dasharray="6 4""#)] {
            let mut points = String::new();
            for s in &picked {
                let value = if series == 0 {
                    s.v[axis]
                } else {
                    s.v_hat[axis]
                };
                if value.is_finite() {
                    let _ = write!(points, "{:.2},{:.2} ", x_of(s.t), y_of(value));
                }
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                points.trim_end()
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use invobs_core::simulation::{simulate, SimConfig};

    #[test]
    fn plot_has_three_panels_with_two_series_each() {
        let record = simulate(&SimConfig {
            t_end: 0.5,
            ..SimConfig::default()
        })
        .unwrap();
        let svg = velocity_svg(&record);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 6);
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
    }

    #[test]
    fn long_records_are_thinned() {
        let record = simulate(&SimConfig {
            t_end: 5.0,
            ..SimConfig::default()
        })
        .unwrap();
        let svg = velocity_svg(&record);
        let first = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert!(first.matches(',').count() <= MAX_POINTS + 1);
    }
}
