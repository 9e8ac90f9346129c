use std::collections::BTreeMap;
use std::fmt::Write;

use super::{format_float, Method, StudyRecord};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

type SeriesKey = (u64, u64, Method);

/// Log-log chart of `abs_err` against `N`, one polyline per `(p, alpha, method)`
/// series. Limit rows carry no finite-size error and are not plotted; points
/// with zero error are dropped from their polyline.
pub fn render_svg(records: &[StudyRecord]) -> String {
    let mut series: BTreeMap<SeriesKey, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records {
        if r.method == Method::Limit {
            continue;
        }
        let key = (r.p.to_bits(), r.alpha.to_bits(), r.method);
        let pts = series.entry(key).or_default();
        if let Some(n) = r.n {
            if r.abs_err > 0.0 && r.abs_err.is_finite() {
                pts.push(((n as f64).log10(), r.abs_err.log10()));
            }
        }
    }
    for pts in series.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let (x_lo, x_hi) = decade_range(series.values().flatten().map(|p| p.0));
    let (y_lo, y_hi) = decade_range(series.values().flatten().map(|p| p.1));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    let x0 = sx(x_lo);
    let x1 = sx(x_hi);
    let y0 = sy(y_lo);
    let y1 = sy(y_hi);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    for d in x_lo as i32..=x_hi as i32 {
        let x = sx(d as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}"/>"#,
            y0 + 5.0
        );
    }
    for d in y_lo as i32..=y_hi as i32 {
        let y = sy(d as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}"/>"#,
            x0 - 5.0
        );
    }
    let _ = writeln!(s, "</g>");

    for d in x_lo as i32..=x_hi as i32 {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">1e{d}</text>"#,
            sx(d as f64),
            y0 + 18.0
        );
    }
    for d in y_lo as i32..=y_hi as i32 {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">1e{d}</text>"#,
            x0 - 8.0,
            sy(d as f64) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">N</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">abs_err</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (i, ((p, alpha, method), pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let label = format!(
            "p={} alpha={} {}",
            format_float(f64::from_bits(*p)),
            format_float(f64::from_bits(*alpha)),
            method
        );
        let points: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{label}</title></polyline>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{label}</text>"#,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Whole decades covering the values, at least one decade wide.
fn decade_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let lo = lo.floor();
    let hi = hi.ceil().max(lo + 1.0);
    (lo, hi)
}
