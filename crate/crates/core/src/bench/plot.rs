//! Dependency-free SVG scatter plots of the three Pareto projections.
//!
//! Quality is drawn on a linear axis. Cost and time use a log axis with
//! decade ticks, unless some value is not positive, in which case the axis
//! falls back to linear and the title says so.

use std::fmt::Write as _;

use crate::pareto::{Axis, ParetoFront, Point2, Projection};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const FRONT_COLOR: &str = "#d62728";
const OTHER_COLOR: &str = "#7f7f7f";

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Linear { lo: f64, hi: f64 },
    /// Decade exponents bounding the data.
    Log { lo: i32, hi: i32 },
}

impl Scale {
    fn for_axis(axis: Axis, values: &[f64]) -> (Scale, Option<String>) {
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        let (min, max) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if finite.is_empty() {
            return (Scale::Linear { lo: 0.0, hi: 1.0 }, None);
        }
        match axis {
            Axis::Quality => {
                let (lo, hi) = if min >= 0.0 && max <= 1.0 {
                    (0.0, 1.0)
                } else {
                    padded(min, max)
                };
                (Scale::Linear { lo, hi }, None)
            }
            Axis::Cost | Axis::Time if min > 0.0 => {
                let lo = min.log10().floor() as i32;
                let mut hi = max.log10().ceil() as i32;
                if hi <= lo {
                    hi = lo + 1;
                }
                (Scale::Log { lo, hi }, None)
            }
            Axis::Cost | Axis::Time => {
                let (lo, hi) = padded(min, max);
                (
                    Scale::Linear { lo, hi },
                    Some(format!("linear {} axis: non-positive values", axis.name())),
                )
            }
        }
    }

    /// Position in [0, 1] along the axis.
    fn fraction(self, v: f64) -> f64 {
        match self {
            Scale::Linear { lo, hi } => (v - lo) / (hi - lo),
            Scale::Log { lo, hi } => (v.log10() - lo as f64) / (hi - lo) as f64,
        }
    }

    /// Major ticks (value, label) and minor tick values.
    fn ticks(self) -> (Vec<(f64, String)>, Vec<f64>) {
        match self {
            Scale::Linear { lo, hi } => {
                let step = nice_step((hi - lo) / 5.0);
                let decimals = (-step.log10().floor()).max(0.0) as usize;
                let first = (lo / step).ceil() as i64;
                let last = (hi / step + 1e-9).floor() as i64;
                let major = (first..=last)
                    .map(|k| {
                        let v = k as f64 * step;
                        (v, format!("{v:.decimals$}"))
                    })
                    .collect();
                (major, Vec::new())
            }
            Scale::Log { lo, hi } => {
                let major = (lo..=hi)
                    .map(|e| (10f64.powi(e), decade_label(e)))
                    .collect();
                let minor = (lo..hi)
                    .flat_map(|e| (2..10).map(move |m| m as f64 * 10f64.powi(e)))
                    .collect();
                (major, minor)
            }
        }
    }

    fn is_log(self) -> bool {
        matches!(self, Scale::Log { .. })
    }
}

fn padded(min: f64, max: f64) -> (f64, f64) {
    if max > min {
        let pad = (max - min) * 0.05;
        (min - pad, max + pad)
    } else {
        let pad = (min.abs() * 0.1).max(0.5);
        (min - pad, max + pad)
    }
}

fn nice_step(raw: f64) -> f64 {
    let magnitude = 10f64.powf(raw.log10().floor());
    let r = raw / magnitude;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * magnitude
}

fn decade_label(e: i32) -> String {
    if e >= 0 {
        format!("{}", 10u64.pow(e as u32))
    } else {
        format!("{:.*}", (-e) as usize, 10f64.powi(e))
    }
}

fn axis_title(axis: Axis) -> &'static str {
    match axis {
        Axis::Quality => "Quality",
        Axis::Cost => "Cost (USD)",
        Axis::Time => "Time (s)",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render one projection. `labels[i]` names `points[i]`; `front` holds
/// indices into `points`, ordered by x.
pub fn render_svg(
    projection: Projection,
    labels: &[String],
    points: &[Point2],
    front: &ParetoFront,
) -> String {
    let (x_axis, y_axis) = projection.axes();
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
    let (x_scale, x_note) = Scale::for_axis(x_axis, &xs);
    let (y_scale, y_note) = Scale::for_axis(y_axis, &ys);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + x_scale.fraction(v) * pw;
    let py = |v: f64| TOP + ph - y_scale.fraction(v) * ph;

    let mut title = format!("{} vs. {}", axis_title(x_axis), axis_title(y_axis));
    let notes: Vec<String> = x_note
        .into_iter()
        .chain(y_note)
        .chain(points.is_empty().then(|| "no data".to_string()))
        .collect();
    if !notes.is_empty() {
        title.push_str(&format!(" ({})", notes.join("; ")));
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&title)
    );

    // Frame.
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    // X axis.
    let (major, minor) = x_scale.ticks();
    let _ = writeln!(
        svg,
        r#"<g class="x-axis" data-scale="{}">"#,
        if x_scale.is_log() { "log" } else { "linear" }
    );
    let base = TOP + ph;
    for v in minor {
        let x = px(v);
        let _ = writeln!(
            svg,
            r#"<line class="tick minor" x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            base + 3.0
        );
    }
    for (v, label) in major {
        let x = px(v);
        let _ = writeln!(
            svg,
            r#"<line class="tick major" x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            base + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            base + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        axis_title(x_axis)
    );
    svg.push_str("</g>\n");

    // Y axis.
    let (major, minor) = y_scale.ticks();
    let _ = writeln!(
        svg,
        r#"<g class="y-axis" data-scale="{}">"#,
        if y_scale.is_log() { "log" } else { "linear" }
    );
    for v in minor {
        let y = py(v);
        let _ = writeln!(
            svg,
            r#"<line class="tick minor" x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 3.0
        );
    }
    for (v, label) in major {
        let y = py(v);
        let _ = writeln!(
            svg,
            r#"<line class="tick major" x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 9.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        axis_title(y_axis)
    );
    svg.push_str("</g>\n");

    // Front line, then points so markers sit on top.
    if front.len() > 1 {
        let coords: Vec<String> = front
            .members
            .iter()
            .map(|&i| format!("{:.2},{:.2}", px(points[i].x), py(points[i].y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="front" fill="none" stroke="{FRONT_COLOR}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
    }
    for (i, p) in points.iter().enumerate() {
        let on_front = front.contains(i);
        let (class, color) = if on_front {
            ("point front", FRONT_COLOR)
        } else {
            ("point", OTHER_COLOR)
        };
        let (x, y) = (px(p.x), py(p.y));
        let label = escape(labels.get(i).map_or("", String::as_str));
        let _ = writeln!(
            svg,
            r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="5" fill="{color}"><title>{label}</title></circle>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{label}</text>"#,
            x + 7.0,
            y - 7.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
