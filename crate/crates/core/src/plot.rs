//! Error-versus-iteration SVG plots on a log-scale y axis.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solvers::IterationTrace;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub values: Vec<f64>,
    pub dashed: bool,
    pub color: usize,
}

/// One solid curve per trace and, when it carries a rate, a dashed bound
/// `rate^k * errors[0]` in the same color.
pub fn trace_curves(traces: &[IterationTrace]) -> Vec<Curve> {
    let mut curves = Vec::new();
    for (i, t) in traces.iter().enumerate() {
        curves.push(Curve {
            label: format!("{} (tau = {:.4e})", t.algorithm, t.step_size),
            values: t.errors.clone(),
            dashed: false,
            color: i,
        });
        if let Some(rate) = t.theoretical_rate {
            curves.push(Curve {
                label: format!("{} bound, rate {:.5}", t.algorithm, rate),
                values: (0..t.errors.len()).map(|k| t.theoretical_bound(k).unwrap_or(0.0)).collect(),
                dashed: true,
                color: i,
            });
        }
    }
    curves
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn plot_curves(curves: &[Curve], title: &str) -> String {
    let (w, h) = (720.0, 460.0);
    let (left, top, pw, ph) = (70.0, 30.0, 400.0, 370.0);
    let positive = curves
        .iter()
        .flat_map(|c| c.values.iter().copied())
        .filter(|v| *v > 0.0 && v.is_finite());
    let (lo, hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() {
        let (l, u) = (lo.log10().floor(), hi.log10().ceil());
        (l, if u > l { u } else { l + 1.0 })
    } else {
        (-1.0, 0.0)
    };
    let kmax = curves.iter().map(|c| c.values.len()).max().unwrap_or(1).saturating_sub(1).max(1) as f64;
    let x = |k: f64| left + pw * k / kmax;
    let y = |v: f64| {
        let lv = if v > 0.0 { v.log10().max(lo) } else { lo };
        top + ph * (hi - lv) / (hi - lo)
    };

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" font-size="13" text-anchor="middle">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(svg, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let mut decade = lo;
    while decade <= hi + 1e-9 {
        let yy = y(10f64.powf(decade));
        let _ = writeln!(svg, r##"<line x1="{left}" y1="{yy:.2}" x2="{}" y2="{yy:.2}" stroke="#ddd"/>"##, left + pw);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" font-size="10" text-anchor="end">1e{}</text>"#, left - 4.0, yy + 3.0, decade as i64);
        decade += 1.0;
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">iteration</text>"#, left + pw / 2.0, top + ph + 22.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#, left + pw, top + ph + 12.0, kmax as usize);

    for c in curves {
        if c.values.is_empty() {
            continue;
        }
        let color = PALETTE[c.color % PALETTE.len()];
        let dash = if c.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let points: Vec<String> = c
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| format!("{:.2},{:.2}", x(k as f64), y(v)))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, points.join(" "));
    }

    let lx = left + pw + 15.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    if curves.is_empty() {
        let _ = writeln!(svg, r#"<text x="{lx}" y="{}" font-size="11">no traces</text>"#, top + 12.0);
    }
    for (i, c) in curves.iter().enumerate() {
        let ly = top + 12.0 + 16.0 * i as f64;
        let color = PALETTE[c.color % PALETTE.len()];
        let dash = if c.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>"#, lx + 22.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, lx + 27.0, ly + 3.5, escape(&c.label));
    }
    let _ = writeln!(svg, "</g>\n</svg>");
    svg
}

pub fn plot_traces(traces: &[IterationTrace], title: &str, output: &Path) -> Result<()> {
    let svg = plot_curves(&trace_curves(traces), title);
    std::fs::write(output, svg).map_err(|e| Error::io(format!("writing {}", output.display()), e))
}

/// Rate-versus-step-size curves on linear axes, `y` in `[0, 1]`. Non-finite
/// values break a curve into separate polylines.
pub fn plot_rate_curves(series: &[(String, Vec<(f64, f64)>)], title: &str) -> String {
    let (w, h) = (720.0, 460.0);
    let (left, top, pw, ph) = (70.0, 30.0, 400.0, 370.0);
    let xmax = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.0))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let xmax = if xmax > 0.0 { xmax } else { 1.0 };
    let x = |t: f64| left + pw * t / xmax;
    let y = |r: f64| top + ph * (1.0 - r.clamp(0.0, 1.0));

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" font-size="13" text-anchor="middle">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(svg, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let r = i as f64 / 4.0;
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" font-size="10" text-anchor="end">{r}</text>"#, left - 4.0, y(r) + 3.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">tau</text>"#, left + pw / 2.0, top + ph + 22.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{xmax:.4e}</text>"#, left + pw, top + ph + 12.0);
    for (i, (_, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for run in pts.split(|p| !p.1.is_finite()) {
            if run.is_empty() {
                continue;
            }
            let points: Vec<String> = run.iter().map(|&(t, r)| format!("{:.2},{:.2}", x(t), y(r))).collect();
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        }
    }
    let lx = left + pw + 15.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, (label, _)) in series.iter().enumerate() {
        let ly = top + 12.0 + 16.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"/>"#, lx + 22.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, lx + 27.0, ly + 3.5, escape(label));
    }
    let _ = writeln!(svg, "</g>\n</svg>");
    svg
}
