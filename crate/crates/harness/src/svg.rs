//! Minimal SVG 1.1 emitters: polylines for phase portraits and time series,
//! and grouped bars for ensemble summaries. Output depends only on the input
//! data, so it is byte-reproducible.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy)]
struct Extent {
    min: f64,
    max: f64,
}

impl Extent {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if !min.is_finite() {
            return Extent { min: 0.0, max: 1.0 };
        }
        if max - min < 1e-12 {
            return Extent {
                min: min - 0.5,
                max: max + 0.5,
            };
        }
        Extent { min, max }
    }

    fn map(&self, v: f64, lo: f64, hi: f64) -> f64 {
        lo + (v - self.min) / (self.max - self.min) * (hi - lo)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x: Extent, y: Extent, x_label: &str, y_label: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (v, anchor, xpos) in [(x.min, "start", l), (x.max, "end", r)] {
        let _ = writeln!(
            out,
            r#"<text x="{xpos}" y="{}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{v:.4}</text>"#,
            b + 14.0
        );
    }
    for (v, ypos) in [(y.min, b), (y.max, t + 10.0)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ypos}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.4}</text>"#,
            l - 4.0
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, pts: &[(f64, f64)], x: Extent, y: Extent, color: &str) {
    let mut path = String::with_capacity(pts.len() * 16);
    for &(px, py) in pts {
        let sx = x.map(px, MARGIN, WIDTH - MARGIN);
        let sy = y.map(py, HEIGHT - MARGIN, MARGIN);
        let _ = write!(path, "{sx:.2},{sy:.2} ");
    }
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="0.6" points="{}"/>"#,
        path.trim_end()
    );
}

/// Phase portrait: one polyline through `(x, y)` pairs.
pub fn phase_plot(points: &[(f64, f64)], x_label: &str, y_label: &str, title: &str) -> String {
    let x = Extent::of(points.iter().map(|p| p.0));
    let y = Extent::of(points.iter().map(|p| p.1));
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x, y, x_label, y_label);
    polyline(&mut out, points, x, y, PALETTE[0]);
    out.push_str("</svg>\n");
    out
}

/// Several series against a shared time axis.
pub fn time_series_plot(t: &[f64], series: &[(&str, Vec<f64>)], title: &str) -> String {
    let x = Extent::of(t.iter().copied());
    let y = Extent::of(series.iter().flat_map(|(_, v)| v.iter().copied()));
    let mut out = String::new();
    header(&mut out, title);
    let labels: Vec<&str> = series.iter().map(|(n, _)| *n).collect();
    axes(&mut out, x, y, "t", &labels.join(", "));
    for (i, (_, values)) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = t.iter().copied().zip(values.iter().copied()).collect();
        polyline(&mut out, &pts, x, y, PALETTE[i % PALETTE.len()]);
    }
    out.push_str("</svg>\n");
    out
}

/// Grouped bar chart: one group per category, one bar per series.
pub fn bar_chart(categories: &[String], series: &[(&str, Vec<f64>)], title: &str) -> String {
    let max = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let y = Extent { min: 0.0, max };
    let x = Extent {
        min: 0.0,
        max: categories.len().max(1) as f64,
    };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x, y, "setup", "count");
    let slot = (WIDTH - 2.0 * MARGIN) / categories.len().max(1) as f64;
    let bar = slot * 0.8 / series.len().max(1) as f64;
    let base = HEIGHT - MARGIN;
    for (ci, cat) in categories.iter().enumerate() {
        let x0 = MARGIN + ci as f64 * slot + slot * 0.1;
        for (si, (_, values)) in series.iter().enumerate() {
            let v = values.get(ci).copied().unwrap_or(0.0);
            let top = y.map(v, base, MARGIN);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{top:.2}" width="{bar:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + si as f64 * bar,
                base - top,
                PALETTE[si % PALETTE.len()]
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="9" text-anchor="middle">{}</text>"#,
            x0 + slot * 0.4,
            base + 26.0,
            escape(cat)
        );
    }
    for (si, (name, _)) in series.iter().enumerate() {
        let ly = MARGIN + 14.0 * si as f64 + 10.0;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            ly - 9.0,
            PALETTE[si % PALETTE.len()],
            WIDTH - MARGIN - 135.0,
            ly,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
