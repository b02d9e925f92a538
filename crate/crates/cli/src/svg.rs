//! Minimal native SVG quick-look plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Dots,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>
"#,
        LEFT + (W - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, xr: (f64, f64), yr: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x1, y1) = (W - RIGHT, H - BOTTOM);
    let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - LEFT, y1 - TOP);
    for i in 0..=4 {
        let u = i as f64 / 4.0;
        let px = LEFT + u * (x1 - LEFT);
        let py = y1 - u * (y1 - TOP);
        let xv = xr.0 + u * (xr.1 - xr.0);
        let yv = yr.0 + u * (yr.1 - yr.0);
        let _ = writeln!(out, r#"<line x1="{px:.1}" y1="{y1}" x2="{px:.1}" y2="{}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(out, r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#, y1 + 18.0, tick(xv));
        let _ = writeln!(out, r#"<line x1="{}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, tick(yv));
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, LEFT + (x1 - LEFT) / 2.0, H - 15.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0:.1}" text-anchor="middle" transform="rotate(-90 16 {0:.1})">{1}</text>"#,
        TOP + (y1 - TOP) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

/// Line or scatter plot of several series.
pub fn xy_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], mark: Mark) -> String {
    let xr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (x1, y1) = (W - RIGHT, H - BOTTOM);
    let map = |(x, y): (f64, f64)| (LEFT + (x - xr.0) / (xr.1 - xr.0) * (x1 - LEFT), y1 - (y - yr.0) / (yr.1 - yr.0) * (y1 - TOP));
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, xr, yr, xlabel, ylabel);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).map(map).collect();
        match mark {
            Mark::Line if pts.len() > 1 => {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
            }
            _ => {
                for (x, y) in &pts {
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
                }
            }
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(out, r#"<rect x="{}" y="{:.1}" width="12" height="12" fill="{color}"/>"#, x1 + 10.0, ly - 6.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}">{}</text>"#, x1 + 28.0, ly + 4.0, escape(&s.name));
    }
    out.push_str("</svg>\n");
    out
}

/// Categorical raster; `cells[i][j]` is drawn at column `i` (x) and row `j` (y).
pub fn category_raster(title: &str, xlabel: &str, ylabel: &str, x: &[f64], y: &[f64], cells: &[Vec<String>]) -> String {
    let mut names: Vec<&str> = cells.iter().flatten().map(String::as_str).collect();
    names.sort_unstable();
    names.dedup();
    let color = |name: &str| {
        if name.starts_with("BOUNDARY") {
            return "#000000";
        }
        let k = names.iter().filter(|n| !n.starts_with("BOUNDARY")).position(|n| *n == name).unwrap_or(0);
        PALETTE[k % PALETTE.len()]
    };
    let xr = (x.first().copied().unwrap_or(0.0), x.last().copied().unwrap_or(1.0));
    let yr = (y.first().copied().unwrap_or(0.0), y.last().copied().unwrap_or(1.0));
    let (x1, y1) = (W - RIGHT, H - BOTTOM);
    let (cw, ch) = ((x1 - LEFT) / x.len().max(1) as f64, (y1 - TOP) / y.len().max(1) as f64);
    let mut out = String::new();
    header(&mut out, title);
    for (i, col) in cells.iter().enumerate() {
        for (j, name) in col.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                LEFT + i as f64 * cw,
                y1 - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                color(name)
            );
        }
    }
    axes(&mut out, xr, yr, xlabel, ylabel);
    for (k, name) in names.iter().filter(|n| !n.starts_with("BOUNDARY")).enumerate() {
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(out, r#"<rect x="{}" y="{:.1}" width="12" height="12" fill="{}"/>"#, x1 + 10.0, ly - 6.0, color(name));
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}">{}</text>"#, x1 + 28.0, ly + 4.0, escape(name));
    }
    out.push_str("</svg>\n");
    out
}
