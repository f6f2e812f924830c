//! Grayscale SVG heatmap of success rates: `s` across, `n` up, white for
//! rate 1 and black for rate 0.

use std::fmt::Write;

use crate::io::RateCell;

const CELL_MAX: f64 = 24.0;
const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 320.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const LEGEND_W: f64 = 18.0;
const LEGEND_GAP: f64 = 40.0;

/// Gray level for a rate, linear in the rate.
pub fn gray(rate: f64) -> u8 {
    (rate.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn sorted_unique(v: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = v.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Labels at most `max` evenly spaced ticks, always including the ends.
fn tick_indices(len: usize, max: usize) -> Vec<usize> {
    if len <= max {
        return (0..len).collect();
    }
    let step = len.div_ceil(max);
    let mut out: Vec<usize> = (0..len).step_by(step).collect();
    if *out.last().unwrap() != len - 1 {
        out.push(len - 1);
    }
    out
}

/// Renders `cells` as an SVG 1.1 document. Grid positions with no cell are
/// hatched.
pub fn render_heatmap(cells: &[RateCell], m: Option<usize>) -> String {
    let s_axis = sorted_unique(cells.iter().map(|c| c.s));
    let n_axis = sorted_unique(cells.iter().map(|c| c.n));
    let cw = (PLOT_W / s_axis.len() as f64).min(CELL_MAX);
    let ch = (PLOT_H / n_axis.len() as f64).min(CELL_MAX * 2.0);
    let (pw, ph) = (cw * s_axis.len() as f64, ch * n_axis.len() as f64);
    let legend_x = LEFT + pw + LEGEND_GAP;
    let width = legend_x + LEGEND_W + 60.0;
    let height = TOP + ph + 60.0;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let title = match m {
        Some(m) => format!("Recovery rate, m = {m}"),
        None => "Recovery rate".to_string(),
    };
    let _ = writeln!(svg, "<title>{title}</title>");
    let _ = writeln!(
        svg,
        r#"<defs><pattern id="missing" width="6" height="6" patternUnits="userSpaceOnUse"><rect width="6" height="6" fill="rgb(255,255,255)"/><path d="M0,6 L6,0" stroke="rgb(160,160,160)" stroke-width="1"/></pattern><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="rgb(0,0,0)"/><stop offset="1" stop-color="rgb(255,255,255)"/></linearGradient></defs>"#
    );
    let _ = writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="url(#missing)"/>"#);

    let _ = writeln!(svg, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for c in cells {
        let col = s_axis.binary_search(&c.s).unwrap();
        let row = n_axis.binary_search(&c.n).unwrap();
        let x = LEFT + col as f64 * cw;
        let y = TOP + ph - (row + 1) as f64 * ch;
        let g = gray(c.rate);
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{y}" width="{cw}" height="{ch}" fill="rgb({g},{g},{g})"><title>n={} s={} rate={}</title></rect>"#,
            c.n, c.s, c.rate
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="rgb(0,0,0)"/>"#
    );

    for i in tick_indices(s_axis.len(), 16) {
        let x = LEFT + (i as f64 + 0.5) * cw;
        let y = TOP + ph;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{x}" y2="{}" stroke="rgb(0,0,0)"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
            y + 4.0,
            y + 16.0,
            s_axis[i]
        );
    }
    for i in tick_indices(n_axis.len(), 16) {
        let y = TOP + ph - (i as f64 + 0.5) * ch;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="rgb(0,0,0)"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            y + 4.0,
            n_axis[i]
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">sparsity s</text>"#,
        LEFT + pw / 2.0,
        TOP + ph + 36.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">measurements n</text>"#,
        TOP + ph / 2.0
    );
    let _ = writeln!(svg, r#"<text x="{LEFT}" y="{}">{title}</text>"#, TOP - 10.0);

    let _ = writeln!(svg, r#"<g id="legend">"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{legend_x}" y="{TOP}" width="{LEGEND_W}" height="{ph}" fill="url(#scale)" stroke="rgb(0,0,0)"/>"#
    );
    for (frac, label) in [(0.0, "0%"), (0.5, "50%"), (1.0, "100%")] {
        let y = TOP + ph * (1.0 - frac);
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{y}" x2="{1}" y2="{y}" stroke="rgb(0,0,0)"/><text x="{2}" y="{3}">{label}</text>"#,
            legend_x + LEGEND_W,
            legend_x + LEGEND_W + 4.0,
            legend_x + LEGEND_W + 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    svg
}
