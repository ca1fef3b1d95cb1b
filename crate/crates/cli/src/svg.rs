//! Scatter-plus-curve SVG plots. Text output with fixed-precision
//! coordinates, so a given dataset always renders to identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 38.0;
const MARGIN_B: f64 = 48.0;

struct Axis {
    min: f64,
    max: f64,
}

impl Axis {
    fn of(values: impl Iterator<Item = f64>) -> Axis {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            min = min.min(v);
            max = max.max(v);
        }
        if !min.is_finite() || !max.is_finite() {
            return Axis { min: 0.0, max: 1.0 };
        }
        // Degenerate ranges get a unit pad so the projection stays finite.
        if max - min < 1e-12 {
            min -= 0.5;
            max += 0.5;
        }
        let pad = (max - min) * 0.05;
        Axis {
            min: min - pad,
            max: max + pad,
        }
    }

    fn project(&self, v: f64, lo_px: f64, hi_px: f64) -> f64 {
        lo_px + (v - self.min) / (self.max - self.min) * (hi_px - lo_px)
    }
}

/// Render day-vs-difference points and one fitted curve.
pub fn scatter_curve(title: &str, points: &[(f64, f64)], curve: &[(f64, f64)]) -> String {
    let xs = Axis::of(points.iter().chain(curve.iter()).map(|p| p.0));
    let ys = Axis::of(points.iter().chain(curve.iter()).map(|p| p.1));
    let px = |x: f64| xs.project(x, MARGIN_L, WIDTH - MARGIN_R);
    let py = |y: f64| ys.project(y, HEIGHT - MARGIN_B, MARGIN_T);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" font-family="monospace" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        title
    );
    // Axes.
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    );
    // Four ticks per axis.
    for i in 0..=3 {
        let t = i as f64 / 3.0;
        let xv = xs.min + t * (xs.max - xs.min);
        let yv = ys.min + t * (ys.max - ys.min);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="middle">{:.2}</text>"#,
            px(xv),
            HEIGHT - MARGIN_B + 16.0,
            xv
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="end">{:.2}</text>"#,
            MARGIN_L - 6.0,
            py(yv) + 3.0,
            yv
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="middle">day</text>"#,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-family="monospace" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.2})">difference</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    if !curve.is_empty() {
        let mut path = String::new();
        for (i, (x, y)) in curve.iter().enumerate() {
            let _ = write!(
                path,
                "{}{:.2},{:.2}",
                if i == 0 { "" } else { " " },
                px(*x),
                py(*y)
            );
        }
        let _ = writeln!(
            s,
            r##"<polyline points="{path}" fill="none" stroke="#1a6fb4" stroke-width="1.5"/>"##
        );
    }
    for (x, y) in points {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#c23b21" fill-opacity="0.75"/>"##,
            px(*x),
            py(*y)
        );
    }
    s.push_str("</svg>\n");
    s
}
