//! Minimal SVG emitters: a density heatmap and a margin-versus-N line plot.

use std::fmt::Write;

use noonbell_core::marginals::DensityGrid;
use noonbell_core::OptimizationResult;

use crate::output::float;

const HEATMAP_SIZE: f64 = 512.0;
/// Color-map endpoints, low to high.
const LOW: [f64; 3] = [13.0, 8.0, 135.0];
const HIGH: [f64; 3] = [240.0, 249.0, 33.0];

fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let c: Vec<u8> = LOW.iter().zip(HIGH).map(|(lo, hi)| (lo + t * (hi - lo)).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap with `y` increasing downwards and `v` to the right; color is
/// linear between the grid minimum and maximum.
pub fn heatmap(grid: &DensityGrid) -> String {
    let (ny, nv) = (grid.y_axis.count, grid.v_axis.count);
    let (lo, hi) = (grid.min_value(), grid.max_value());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (cw, ch) = (HEATMAP_SIZE / nv as f64, HEATMAP_SIZE / ny as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges">"#,
        w = HEATMAP_SIZE,
        h = HEATMAP_SIZE + 24.0
    );
    let _ = writeln!(
        s,
        "<metadata>kind={} N={} count={} y=[{},{}] v=[{},{}] min={} max={} colormap=linear</metadata>",
        grid.kind.label(),
        grid.n,
        nv,
        float(grid.y_axis.min),
        float(grid.y_axis.max),
        float(grid.v_axis.min),
        float(grid.v_axis.max),
        float(lo),
        float(hi)
    );
    for iy in 0..ny {
        for iv in 0..nv {
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                iv as f64 * cw,
                iy as f64 * ch,
                cw,
                ch,
                color((grid.get(iy, iv) - lo) / span)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="4" y="{:.0}" font-family="monospace" font-size="12">{} N={} min={:.4e} max={:.4e}</text>"#,
        HEATMAP_SIZE + 17.0,
        escape(grid.kind.label()),
        grid.n,
        lo,
        hi
    );
    s.push_str("</svg>\n");
    s
}

/// Violation margin against `N`, with the zero line dashed.
pub fn margin_plot(results: &[OptimizationResult]) -> String {
    let (w, h, pad) = (480.0, 320.0, 48.0);
    let ns: Vec<f64> = results.iter().map(|r| r.n as f64).collect();
    let ms: Vec<f64> = results.iter().map(|r| r.violation_margin).collect();
    let (nmin, nmax) = ns.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (mmin, mmax) =
        ms.iter().chain([0.0].iter()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let nspan = if nmax > nmin { nmax - nmin } else { 1.0 };
    let mspan = if mmax > mmin { mmax - mmin } else { 1.0 };
    let px = |n: f64| pad + (n - nmin) / nspan * (w - 2.0 * pad);
    let py = |m: f64| h - pad - (m - mmin) / mspan * (h - 2.0 * pad);
    let name = results.first().map_or("", |r| r.functional_name.as_str());
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, "<metadata>functional={} points={}</metadata>", escape(name), results.len());
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{a:.2},{b:.2} L{a:.2},{c:.2} L{d:.2},{c:.2}" stroke="black" fill="none"/>"#,
        a = pad,
        b = pad,
        c = h - pad,
        d = w - pad
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
        pad,
        w - pad,
        y = py(0.0)
    );
    let points: Vec<String> = ns.iter().zip(&ms).map(|(&n, &m)| format!("{:.2},{:.2}", px(n), py(m))).collect();
    let _ = writeln!(s, r#"<polyline points="{}" stroke="navy" fill="none" stroke-width="1.5"/>"#, points.join(" "));
    for (&n, &m) in ns.iter().zip(&ms) {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="navy"/>"#, px(n), py(m));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"#,
            px(n),
            h - pad + 16.0,
            n
        );
    }
    for m in [mmin, mmax] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="end">{:.3e}</text>"#,
            pad - 4.0,
            py(m) + 4.0,
            m
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" font-family="monospace" font-size="13" text-anchor="middle">{} violation margin vs N</text>"#,
        w / 2.0,
        escape(name)
    );
    s.push_str("</svg>\n");
    s
}
