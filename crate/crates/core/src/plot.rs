//! Minimal SVG line plots of a run's diagnostics.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::run::{read_csv, CSV_FILE};

pub const PLOT_FILE: &str = "diagnostics.svg";

const WIDTH: f64 = 640.0;
const PANEL_H: f64 = 200.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 30.0;

fn fmt_tick(x: f64) -> String {
    if x != 0.0 && (x.abs() >= 1e4 || x.abs() < 1e-2) {
        format!("{x:.2e}")
    } else {
        format!("{x:.3}")
    }
}

fn panel(svg: &mut String, top: f64, title: &str, pts: &[(f64, f64)], color: &str) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = top + MARGIN_T;
    let y1 = top + PANEL_H - MARGIN_B;
    let _ = writeln!(svg, r#"<text x="{x0}" y="{}" font-size="14">{title}</text>"#, top + 18.0);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    let finite: Vec<(f64, f64)> = pts.iter().copied().filter(|(t, v)| t.is_finite() && v.is_finite()).collect();
    if finite.is_empty() {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12">no data</text>"#, x0 + 10.0, (y0 + y1) / 2.0);
        return;
    }
    let (tmin, tmax) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut vmin, mut vmax) =
        finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if vmax - vmin <= 1e-12 * vmax.abs().max(1.0) {
        let pad = 0.5 * vmax.abs().max(1e-12);
        vmin -= pad;
        vmax += pad;
    }
    let tspan = if tmax > tmin { tmax - tmin } else { 1.0 };
    let sx = |t: f64| x0 + (t - tmin) / tspan * (x1 - x0);
    let sy = |v: f64| y1 - (v - vmin) / (vmax - vmin) * (y1 - y0);
    let mut path = String::new();
    for (i, (t, v)) in finite.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(*t), sy(*v));
    }
    let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.trim_end());
    for (v, y) in [(vmax, y0), (vmin, y1)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    for (t, anchor) in [(tmin, "start"), (tmax, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="{anchor}">t = {}</text>"#,
            sx(t),
            y1 + 16.0,
            fmt_tick(t)
        );
    }
}

/// Renders `linf_u(t)`, `min_v(t)` and `y(t)` as three stacked panels.
pub fn render_svg(records: &[DiagnosticsRecord]) -> String {
    let height = 3.0 * PANEL_H;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let series: [(&str, &str, fn(&DiagnosticsRecord) -> f64); 3] = [
        ("max u", "#1f77b4", |r| r.linf_u),
        ("min v", "#2ca02c", |r| r.min_v),
        ("y", "#d62728", |r| r.y),
    ];
    for (k, (title, color, get)) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.t, get(r))).collect();
        panel(&mut svg, k as f64 * PANEL_H, title, &pts, color);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Reads `<rundir>/diagnostics.csv` and writes `<rundir>/diagnostics.svg`.
pub fn plot_run(run_dir: &Path) -> Result<PathBuf> {
    let records = read_csv(&run_dir.join(CSV_FILE))?;
    if records.is_empty() {
        return Err(Error::Validation(format!("{}: no diagnostics rows", run_dir.display())));
    }
    let out = run_dir.join(PLOT_FILE);
    std::fs::write(&out, render_svg(&records)).map_err(|e| Error::io(&out, e))?;
    Ok(out)
}
