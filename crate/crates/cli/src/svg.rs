//! Minimal SVG charts: a coordinate scatter and a multi-series line chart.
//!
//! Coordinates are printed with two decimals so identical inputs give
//! identical bytes.

use std::fmt::Write;

use flowspec_core::Matrix;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if !lo.is_finite() || !hi.is_finite() {
            return Axis { lo: 0.0, hi: 1.0 };
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            return Axis {
                lo: lo - 0.5,
                hi: hi + 0.5,
            };
        }
        Axis { lo, hi }
    }

    /// Maps `v` into `[0, 1]`.
    fn unit(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    let (a, b) = (MARGIN, SIZE - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{a:.2}" y="{a:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="dimgray"/>"#,
        b - a,
        b - a
    );
}

fn axis_labels(out: &mut String, x: &str, y: &str, xa: &Axis, ya: &Axis) {
    let b = SIZE - MARGIN;
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE - 12.0,
        escape(x)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y)
    );
    for (v, px, py, anchor) in [
        (xa.lo, MARGIN, b + 16.0, "start"),
        (xa.hi, b, b + 16.0, "end"),
        (ya.lo, MARGIN - 4.0, b, "end"),
        (ya.hi, MARGIN - 4.0, MARGIN + 10.0, "end"),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{py:.2}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{}</text>"#,
            tick(v)
        );
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn to_px(ux: f64, uy: f64) -> (f64, f64) {
    let span = SIZE - 2.0 * MARGIN;
    (MARGIN + ux * span, SIZE - MARGIN - uy * span)
}

/// Scatter of the first two columns of `coords` (one row per point). With a
/// third column, its value sets the marker shade from light to dark.
pub fn scatter(coords: &Matrix, title: &str) -> String {
    let (n, q) = coords.shape();
    let xs: Vec<f64> = (0..n).map(|j| coords[(j, 0)]).collect();
    let ys: Vec<f64> = if q > 1 {
        (0..n).map(|j| coords[(j, 1)]).collect()
    } else {
        vec![0.0; n]
    };
    let xa = Axis::fit(xs.iter().copied());
    let ya = Axis::fit(ys.iter().copied());
    let shade = (q > 2).then(|| {
        let zs: Vec<f64> = (0..n).map(|j| coords[(j, 2)]).collect();
        let za = Axis::fit(zs.iter().copied());
        zs.into_iter()
            .map(|z| (200.0 * (1.0 - za.unit(z))).round() as u8)
            .collect::<Vec<_>>()
    });

    let mut out = String::new();
    header(&mut out, title);
    axis_labels(&mut out, "c1", if q > 1 { "c2" } else { "" }, &xa, &ya);
    for j in 0..n {
        let (px, py) = to_px(xa.unit(xs[j]), ya.unit(ys[j]));
        let fill = match &shade {
            Some(g) => format!("rgb({0},{0},{0})", g[j]),
            None => PALETTE[0].to_string(),
        };
        let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{fill}"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// Line chart of several series against a 1-based index, with a legend.
pub fn line_chart(series: &[(&str, &[f64])], title: &str, y_label: &str) -> String {
    let len = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0).max(2);
    let xa = Axis {
        lo: 1.0,
        hi: len as f64,
    };
    let ya = Axis::fit(
        series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .chain([0.0, 1.0]),
    );

    let mut out = String::new();
    header(&mut out, title);
    axis_labels(&mut out, "index", y_label, &xa, &ya);
    for (k, (name, values)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (px, py) = to_px(xa.unit((i + 1) as f64), ya.unit(v));
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let lx = SIZE - MARGIN - 110.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 24.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
