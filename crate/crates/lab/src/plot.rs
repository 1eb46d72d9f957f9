//! SVG plot of a sweep CSV: `hajlasz_constructive / sobolev` against `p`.
//!
//! Depends on the CSV text only. The x axis is logarithmic in `p`; `p = inf`
//! sits in an extra slot at the right edge. One polyline per `(s, level)`,
//! one dashed vertical line per Romanov threshold.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::sweep::romanov_threshold;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
struct Point {
    n: usize,
    s: f64,
    level: String,
    p: f64,
    ratio: f64,
}

fn parse(csv_text: &str) -> anyhow::Result<Vec<Point>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let head = r.headers()?.clone();
    let col = |name: &str| head.iter().position(|h| h == name).ok_or_else(|| anyhow::anyhow!("CSV has no `{name}` column"));
    let (cn, cs, cp, cl, cc, cb, ce) =
        (col("n")?, col("s")?, col("p")?, col("level")?, col("hajlasz_constructive")?, col("sobolev")?, col("error")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if !rec[ce].is_empty() {
            continue;
        }
        let num = |i: usize| rec[i].parse::<f64>().unwrap_or(f64::NAN);
        let ratio = num(cc) / num(cb);
        if !ratio.is_finite() {
            continue;
        }
        out.push(Point { n: rec[cn].parse()?, s: num(cs), level: rec[cl].to_string(), p: num(cp), ratio });
    }
    Ok(out)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;")
}

/// Renders the plot for the sweep CSV in `csv_text`.
pub fn sweep_svg(csv_text: &str) -> anyhow::Result<String> {
    let pts = parse(csv_text)?;
    let finite: Vec<f64> = pts.iter().map(|q| q.p).filter(|p| p.is_finite()).collect();
    let has_inf = pts.iter().any(|q| q.p.is_infinite());
    let mut thresholds: Vec<f64> = Vec::new();
    for q in &pts {
        let t = romanov_threshold(q.n, q.s);
        if t.is_finite() && !thresholds.contains(&t) {
            thresholds.push(t);
        }
    }
    thresholds.sort_by(f64::total_cmp);
    let lo = finite.iter().chain(&thresholds).copied().fold(f64::INFINITY, f64::min).min(1.0);
    let hi = finite.iter().chain(&thresholds).copied().fold(lo * 2.0, f64::max);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let slot = if has_inf { (lhi - llo) * 0.15 } else { 0.0 };
    let span = (lhi - llo + slot).max(1e-9);
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let x_of = |p: f64| {
        let l = if p.is_infinite() { lhi + slot } else { p.ln() };
        LEFT + (l - llo) / span * plot_w
    };
    let ymax = pts.iter().map(|q| q.ratio).fold(0.0, f64::max).max(1e-12) * 1.1;
    let y_of = |r: f64| TOP + plot_h * (1.0 - r / ymax);

    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#)?;
    writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    writeln!(
        svg,
        r#"<g stroke="black" fill="none"><line x1="{LEFT}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b}"/></g>"#,
        b = H - BOTTOM,
        r = W - RIGHT
    )?;
    writeln!(svg, r#"<g font-family="sans-serif" font-size="11" text-anchor="middle">"#)?;
    let mut ticks = finite.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for p in &ticks {
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{p}</text>"#, x_of(*p), H - BOTTOM + 16.0)?;
    }
    if has_inf {
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}">inf</text>"#, x_of(f64::INFINITY), H - BOTTOM + 16.0)?;
    }
    for k in 0..=4 {
        let r = ymax * k as f64 / 4.0;
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#, LEFT - 6.0, y_of(r) + 4.0, r)?;
    }
    writeln!(svg, r#"<text x="{:.2}" y="{:.2}">p</text>"#, LEFT + plot_w / 2.0, H - 12.0)?;
    writeln!(svg, r#"<text x="{:.2}" y="18">hajlasz_constructive / sobolev</text>"#, LEFT + plot_w / 2.0)?;
    writeln!(svg, "</g>")?;

    for (k, t) in thresholds.iter().enumerate() {
        let x = x_of(*t);
        writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{b}" stroke="#888" stroke-dasharray="4 3"/><text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="10" fill="#555">{t:.3}</text>"##,
            b = H - BOTTOM,
            y = TOP + 10.0 + 12.0 * k as f64
        )?;
    }

    let mut series: BTreeMap<(u64, String), Vec<(f64, f64)>> = BTreeMap::new();
    for q in &pts {
        series.entry((q.s.to_bits(), q.level.clone())).or_default().push((q.p, q.ratio));
    }
    for (k, ((s, level), mut line)) in series.into_iter().enumerate() {
        line.sort_by(|a, b| a.0.total_cmp(&b.0));
        let colour = COLOURS[k % COLOURS.len()];
        let coords: Vec<String> = line.iter().map(|&(p, r)| format!("{:.2},{:.2}", x_of(p), y_of(r))).collect();
        writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, coords.join(" "))?;
        let label = esc(&format!("s={} level {level}", f64::from_bits(s)));
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="{colour}">{label}</text>"#,
            W - RIGHT - 110.0,
            TOP + 10.0 + 12.0 * k as f64
        )?;
    }
    writeln!(svg, "</svg>")?;
    Ok(svg)
}
