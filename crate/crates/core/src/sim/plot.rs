//! Minimal SVG line plots of BER curves.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::csv::read_sweep_csv;
use crate::error::{Error, Result};

/// Values below this are drawn at the floor of a log axis.
pub const BER_FLOOR: f64 = 1e-8;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            x_label: "SNR (dB)".into(),
            y_label: "BER".into(),
            log_y: true,
        }
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `series` as an SVG document.
pub fn render_svg(series: &[Series], opts: &PlotOptions) -> Result<String> {
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    if all().next().is_none() {
        return Err(Error::invalid("nothing to plot"));
    }
    if all().any(|(x, y)| !x.is_finite() || y.is_nan()) {
        return Err(Error::invalid("plot data contains non-finite values"));
    }
    let ty = |y: f64| if opts.log_y { y.max(BER_FLOOR).log10() } else { y };

    let (mut x0, mut x1) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| (a.min(x), b.max(x)));
    let (mut y0, mut y1) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, y)| {
        (a.min(ty(y)), b.max(ty(y)))
    });
    if opts.log_y {
        y0 = y0.floor();
        y1 = y1.ceil();
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    // String writes cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##
    );

    let step = nice_step(x1 - x0);
    let mut t = (x0 / step).ceil() * step;
    while t <= x1 + 1e-9 {
        let x = px(t);
        let _ = writeln!(
            w,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 16.0,
            super::csv::fmt_g((t * 1e9).round() / 1e9)
        );
        t += step;
    }
    let ystep = if opts.log_y { 1.0 } else { nice_step(y1 - y0) };
    let mut t = (y0 / ystep).ceil() * ystep;
    while t <= y1 + 1e-9 {
        let y = py(t);
        let label = if opts.log_y {
            format!("1e{}", t.round() as i64)
        } else {
            super::csv::fmt_g((t * 1e9).round() / 1e9)
        };
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{label}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
        t += ystep;
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&opts.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(ty(y))))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = LEFT + pw - 160.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Plots the BER column of each sweep CSV, one labelled curve per file.
pub fn emit_plot(csv_paths: &[PathBuf], labels: &[String], out: &Path) -> Result<()> {
    if csv_paths.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} CSV files but {} labels",
            csv_paths.len(),
            labels.len()
        )));
    }
    let series = csv_paths
        .iter()
        .zip(labels)
        .map(|(p, label)| {
            let r = read_sweep_csv(p)?;
            Ok(Series {
                label: label.clone(),
                points: r.points.iter().map(|pt| (pt.snr_db, pt.ber())).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let svg = render_svg(&series, &PlotOptions::default())?;
    fs::write(out, svg).map_err(|e| Error::io(out, e))
}
