//! Minimal SVG line chart of an experiment: `log10(value)` against `T`.

use std::fmt::Write;

use tbp_core::harness::MAX_MEMBER;
use tbp_core::{ExperimentResult, Mode};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Series {
    label: String,
    points: Vec<(f64, f64, bool)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn series(result: &ExperimentResult) -> Vec<Series> {
    let member = result.has_members().then_some(MAX_MEMBER);
    let mut labels: Vec<&str> = Vec::new();
    for cell in &result.cells {
        if !labels.contains(&cell.policy.as_str()) {
            labels.push(&cell.policy);
        }
    }
    labels
        .into_iter()
        .map(|label| Series {
            label: label.to_string(),
            points: result
                .curve(label, member)
                .into_iter()
                .map(|c| (c.horizon as f64, c.estimate.log_value().log10(), c.estimate.censored))
                .collect(),
        })
        .collect()
}

/// Linear map of `[lo, hi]` onto `[a, b]`; a degenerate range maps to the
/// midpoint.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        (a + b) / 2.0
    }
}

/// Render `result` as a standalone SVG document. One polyline per policy
/// (the `max` row for family sweeps); censored cells are hollow markers at
/// `1 / (2N)`.
pub fn emit_svg(result: &ExperimentResult) -> String {
    let all = series(result);
    let pts = || all.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi) = pts().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.0), hi.max(p.0))
    });
    let (mut y_lo, mut y_hi) = pts()
        .filter(|p| p.1.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if !x_lo.is_finite() {
        (x_lo, x_hi) = (0.0, 1.0);
    }
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (-1.0, 0.0);
    }
    y_lo = y_lo.floor();
    y_hi = y_hi.ceil().max(y_lo + 1.0);

    let (px0, px1) = (LEFT, WIDTH - RIGHT);
    let (py0, py1) = (HEIGHT - BOTTOM, TOP);
    let x = |v: f64| scale(v, x_lo, x_hi, px0, px1);
    let y = |v: f64| scale(v, y_lo, y_hi, py0, py1);
    let y_label = match result.mode() {
        Mode::CumulativeRegret => "log10 mean pseudo-regret",
        Mode::BestArmError => "log10 best-arm error",
        Mode::ThresholdLoss => "log10 error rate",
    };

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<rect x="{px0}" y="{py1}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        px1 - px0,
        py0 - py1
    );
    let mut decade = y_lo as i64;
    while decade as f64 <= y_hi {
        let yy = y(decade as f64);
        let _ = writeln!(
            w,
            r##"<line x1="{px0}" y1="{yy:.2}" x2="{px1}" y2="{yy:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{decade}</text>"##,
            px0 - 6.0,
            yy + 4.0
        );
        decade += 1;
    }
    let mut horizons: Vec<f64> = pts().map(|p| p.0).collect();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    for t in &horizons {
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            x(*t),
            py0 + 18.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">T</text>"#,
        (px0 + px1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0
    );

    for (i, s) in all.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.0), y(p.1)))
            .collect();
        if coords.len() > 1 {
            let _ = writeln!(
                w,
                r#"<polyline class="series" data-policy="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                escape(&s.label),
                coords.join(" ")
            );
        }
        for p in &s.points {
            let fill = if p.2 { "white" } else { color };
            let _ = writeln!(
                w,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3.5" fill="{fill}" stroke="{color}"/>"#,
                x(p.0),
                y(p.1)
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            w,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
