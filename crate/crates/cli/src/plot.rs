//! Minimal standalone SVG line/scatter plots.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    /// Shaded `x` interval.
    pub band: Option<(f64, f64)>,
    /// Written into a leading comment, typically the config checksum.
    pub provenance: String,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(style: &PlotStyle) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    // `--` is not allowed inside a comment
    let _ = writeln!(s, "<!-- provenance: {} -->", style.provenance.replace("--", "- -"));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(&style.title)
    );
    s
}

fn placeholder(style: &PlotStyle, warning: &str) -> String {
    let mut s = header(style);
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" text-anchor="middle" fill="#b00">warning: {}</text>"##,
        W / 2.0,
        H / 2.0,
        escape(warning)
    );
    s.push_str("</svg>\n");
    s
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

/// Renders the series. Non-finite points are an error; an empty input, or a
/// log plot with no positive values, gives a placeholder with a warning.
pub fn emit_plot(series: &[Series], style: &PlotStyle) -> Result<String, String> {
    if let Some(s) = series
        .iter()
        .find(|s| s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()))
    {
        return Err(format!("series `{}` has non-finite points", s.label));
    }
    let mut dropped = 0usize;
    let prepared: Vec<(&str, Vec<(f64, f64)>)> = series
        .iter()
        .map(|s| {
            let pts: Vec<(f64, f64)> = if style.log_y {
                s.points
                    .iter()
                    .filter(|p| {
                        let keep = p.1 > 0.0;
                        dropped += usize::from(!keep);
                        keep
                    })
                    .map(|&(x, y)| (x, y.log10()))
                    .collect()
            } else {
                s.points.clone()
            };
            (s.label.as_str(), pts)
        })
        .collect();
    if prepared.iter().all(|(_, p)| p.is_empty()) {
        let why = if dropped > 0 {
            "no positive values for a log axis"
        } else {
            "empty series"
        };
        return Ok(placeholder(style, why));
    }
    let all = || prepared.iter().flat_map(|(_, p)| p.iter());
    let (x0, x1) = range(all().map(|p| p.0).chain(style.band.iter().flat_map(|b| [b.0, b.1])));
    let (y0, y1) = range(all().map(|p| p.1));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = header(style);
    if let Some((a, b)) = style.band {
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{TOP}" width="{:.2}" height="{ph}" fill="#f4a582" fill-opacity="0.35"/>"##,
            sx(a),
            (sx(b) - sx(a)).max(0.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let ylab = if style.log_y {
            format!("1e{fy:.1}")
        } else {
            tick_label(fy)
        };
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            sx(fx),
            TOP + ph + 16.0,
            tick_label(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(fy) + 4.0,
            ylab
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        escape(&style.x_label)
    );
    let ylab = if style.log_y {
        format!("{} (log)", style.y_label)
    } else {
        style.y_label.clone()
    };
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&ylab)
    );
    for (i, (label, pts)) in prepared.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        } else if let Some(&(x, y)) = pts.first() {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{c}"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{c}">{}</text>"#,
            LEFT + 8.0,
            TOP + 16.0 + 14.0 * i as f64,
            escape(label)
        );
    }
    if dropped > 0 {
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" text-anchor="end" fill="#b00">warning: {dropped} nonpositive values omitted</text>"##,
            W - RIGHT,
            TOP - 6.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_one_marker() {
        let svg = emit_plot(&[Series::new("p", vec![(1.0, 2.0)])], &PlotStyle::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_is_placeholder() {
        let svg = emit_plot(&[], &PlotStyle::default()).unwrap();
        assert!(svg.contains("warning: empty series"));
    }

    #[test]
    fn rejects_nan() {
        assert!(emit_plot(&[Series::new("p", vec![(1.0, f64::NAN)])], &PlotStyle::default()).is_err());
    }
}
