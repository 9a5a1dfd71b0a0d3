use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), points }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            title: String::new(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: false,
            width: 800.0,
            height: 500.0,
        }
    }
}

impl PlotOptions {
    pub fn regret() -> Self {
        PlotOptions {
            title: "Regret averaged over time".into(),
            x_label: "T".into(),
            y_label: "regret / T".into(),
            log_x: true,
            ..PlotOptions::default()
        }
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const MARGIN: (f64, f64, f64, f64) = (70.0, 30.0, 40.0, 55.0); // left, right, top, bottom

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Renders a static line chart. Non-finite points are dropped, as are
/// non-positive `x` values on a log axis.
pub fn render_svg(series: &[Series], options: &PlotOptions) -> Result<String> {
    let keep = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!options.log_x || x > 0.0);
    let tx = |x: f64| if options.log_x { x.log10() } else { x };
    let cleaned: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| s.points.iter().copied().filter(keep).map(|(x, y)| (tx(x), y)).collect())
        .collect();
    let all: Vec<(f64, f64)> = cleaned.iter().flatten().copied().collect();
    if all.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if x1 == x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 == y0 {
        let pad = y0.abs().max(1.0) * 0.1;
        y0 -= pad;
        y1 += pad;
    } else {
        let pad = (y1 - y0) * 0.05;
        y0 -= pad;
        y1 += pad;
    }

    let (w, h) = (options.width, options.height);
    let (ml, mr, mt, mb) = MARGIN;
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);

    let x_ticks: Vec<(f64, String)> = if options.log_x {
        let lo = x0.ceil() as i32;
        let hi = x1.floor() as i32;
        let decades: Vec<(f64, String)> = (lo..=hi).map(|k| (k as f64, label(10f64.powi(k)))).collect();
        if decades.len() >= 2 {
            decades
        } else {
            ticks(x0, x1, 5).into_iter().map(|v| (v, label(10f64.powf(v)))).collect()
        }
    } else {
        ticks(x0, x1, 6).into_iter().map(|v| (v, label(v))).collect()
    };
    for (v, text) in x_ticks {
        let x = px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            mt,
            mt + ph,
            mt + ph + 16.0,
            escape(&text)
        );
    }
    for v in ticks(y0, y1, 6) {
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{ml:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            ml + pw,
            ml - 6.0,
            y + 4.0,
            escape(&label(v))
        );
    }

    for (k, pts) in cleaned.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[k % COLORS.len()],
            coords.join(" ")
        );
    }

    for (k, ser) in series.iter().enumerate() {
        let y = mt + 14.0 + 18.0 * k as f64;
        let x = ml + pw - 190.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
            y - 4.0,
            x + 24.0,
            y - 4.0,
            COLORS[k % COLORS.len()],
            x + 30.0,
            escape(&ser.name)
        );
    }

    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        h - 12.0,
        escape(&options.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        mt + ph / 2.0,
        escape(&options.y_label)
    );
    if !options.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            w / 2.0,
            escape(&options.title)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(series: &[Series], options: &PlotOptions, path: &Path) -> Result<()> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("no series to plot".into()));
    }
    std::fs::write(path, render_svg(series, options)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        let doc = roxmltree::Document::parse(svg).unwrap();
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .map(|n| {
                n.attribute("points")
                    .unwrap()
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constant_series_is_horizontal() {
        let s = Series::new("flat", (1..50).map(|t| (t as f64, 3.0)).collect());
        let svg = render_svg(&[s], &PlotOptions::default()).unwrap();
        let lines = polylines(&svg);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].windows(2).all(|w| w[0].1 == w[1].1 && w[1].0 > w[0].0));
    }

    #[test]
    fn three_series_with_escaped_legend() {
        let mk = |name: &str, k: f64| Series::new(name, (1..=1000).map(|t| (t as f64, k / t as f64)).collect());
        let series = [mk("a < b & c", 1.0), mk("max", 2.0), mk("min", 0.5)];
        let svg = render_svg(&series, &PlotOptions::regret()).unwrap();
        assert_eq!(polylines(&svg).len(), 3);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert!(doc.descendants().any(|n| n.text() == Some("a < b & c")));
        assert!(doc.descendants().any(|n| n.text() == Some("1000")));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(render_svg(&[Series::new("x", vec![])], &PlotOptions::default()).is_err());
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plot(&[], &PlotOptions::default(), &dir.path().join("p.svg")).is_err());
        let bad = Series::new("neg", vec![(0.0, 1.0), (-1.0, 2.0)]);
        assert!(render_svg(&[bad], &PlotOptions { log_x: true, ..PlotOptions::default() }).is_err());
    }
}
