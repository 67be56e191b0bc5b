//! SVG renderings of chain image curves and of `|μ|` on the exterior annulus.

use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use loewner_core::LoewnerChain;
use num_complex::Complex64;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;
const CURVE_COLOURS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
/// Anchor colours of the `|μ|` scale on `[0, 1]`.
const SCALE: [(f64, [u8; 3]); 5] = [
    (0.0, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.5, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.0, [253, 231, 37]),
];
const EXCLUDED_FILL: &str = "#bbbbbb";

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">
<title>{title}</title>
<rect x="0" y="0" width="{s}" height="{s}" fill="white"/>"#,
        s = SIZE,
        title = escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Image curves `θ ↦ f(r e^{iθ}, t)` for each `t`, on a common scale.
pub fn curves_svg(
    chain: &LoewnerChain,
    times: &[f64],
    radius: f64,
    points: usize,
) -> Result<String> {
    if !(radius > 0.0 && radius < 1.0) || points < 8 || times.is_empty() {
        bail!("curve plot needs 0 < r < 1, at least 8 points and one time");
    }
    let mut curves = Vec::with_capacity(times.len());
    for &t in times {
        let curve: Vec<Complex64> = (0..points)
            .map(|j| {
                let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / points as f64);
                chain.eval(z, t).map(|p| p.value)
            })
            .collect::<loewner_core::Result<_>>()
            .with_context(|| format!("evaluating the chain at t = {t}"))?;
        curves.push(curve);
    }
    let (mut lo, mut hi) = (
        Complex64::new(f64::INFINITY, f64::INFINITY),
        Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for w in curves.iter().flatten() {
        lo = Complex64::new(lo.re.min(w.re), lo.im.min(w.im));
        hi = Complex64::new(hi.re.max(w.re), hi.im.max(w.im));
    }
    let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let mid = (lo + hi) * 0.5;
    let to_screen = |w: Complex64| {
        (
            SIZE / 2.0 + (w.re - mid.re) * scale,
            SIZE / 2.0 - (w.im - mid.im) * scale,
        )
    };

    let mut out = String::new();
    header(
        &mut out,
        &format!("image curves of {} at r = {radius}", chain.label()),
    );
    let (ox, oy) = to_screen(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        out,
        r##"<circle cx="{ox:.3}" cy="{oy:.3}" r="2" fill="black"/>"##
    );
    for (i, (curve, t)) in curves.iter().zip(times).enumerate() {
        let colour = CURVE_COLOURS[i % CURVE_COLOURS.len()];
        let mut d = String::new();
        for (j, w) in curve.iter().enumerate() {
            let (x, y) = to_screen(*w);
            let _ = write!(d, "{}{x:.3} {y:.3} ", if j == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.5"><title>t = {t}</title></path>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="10" y="{:.0}" font-family="monospace" font-size="12" fill="{colour}">t = {t}</text>"#,
            20.0 + 16.0 * i as f64
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One row of the samples CSV; `abs_mu` is `None` on excluded rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuRow {
    pub r: f64,
    pub theta: f64,
    pub abs_mu: Option<f64>,
}

pub fn read_mu_csv(text: &str) -> Result<Vec<MuRow>> {
    let mut lines = text.lines();
    let head = lines.next().context("empty samples file")?;
    let columns: Vec<&str> = head.split(',').map(str::trim).collect();
    let col = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .with_context(|| format!("samples file has no '{name}' column"))
    };
    let (ir, it, im) = (col("r")?, col("theta")?, col("abs_mu")?);
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            bail!(
                "samples line {}: expected {} fields, found {}",
                n + 2,
                columns.len(),
                fields.len()
            );
        }
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .trim()
                .parse()
                .with_context(|| format!("samples line {}: bad number '{}'", n + 2, fields[k]))
        };
        let abs_mu = if fields[im].trim().is_empty() {
            None
        } else {
            Some(num(im)?)
        };
        rows.push(MuRow {
            r: num(ir)?,
            theta: num(it)?,
            abs_mu,
        });
    }
    if rows.is_empty() {
        bail!("samples file has no rows");
    }
    Ok(rows)
}

/// Fill colour for `|μ|`, quantised to 256 levels on the fixed range `[0, 1]`.
pub fn mu_colour(v: f64) -> String {
    let level = (v.clamp(0.0, 1.0) * 255.0).round() / 255.0;
    let k = SCALE
        .windows(2)
        .position(|w| level <= w[1].0)
        .unwrap_or(SCALE.len() - 2);
    let ((a, ca), (b, cb)) = (SCALE[k], SCALE[k + 1]);
    let s = (level - a) / (b - a);
    let mix = |i: usize| (ca[i] as f64 + s * (cb[i] as f64 - ca[i] as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

fn display_radius(r: f64) -> f64 {
    1.0 + r.ln()
}

/// Heat map of `|μ|` over the exterior samples, drawn as annular cells with
/// the radial coordinate compressed to `1 + log r`.
pub fn mu_svg(rows: &[MuRow], title: &str) -> Result<String> {
    let mut radii: Vec<f64> = rows.iter().map(|r| r.r).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.iter().any(|&r| !(r >= 1.0)) {
        bail!("exterior samples need r >= 1");
    }
    let rho: Vec<f64> = radii.iter().map(|&r| display_radius(r)).collect();
    let edges: Vec<(f64, f64)> = (0..rho.len())
        .map(|i| {
            let below = if i == 0 {
                rho[0] - 0.5 * rho.get(1).map_or(0.2, |n| n - rho[0])
            } else {
                0.5 * (rho[i - 1] + rho[i])
            };
            let above = if i + 1 == rho.len() {
                rho[i] + 0.5 * if i == 0 { 0.2 } else { rho[i] - rho[i - 1] }
            } else {
                0.5 * (rho[i] + rho[i + 1])
            };
            (below.max(1.0), above)
        })
        .collect();
    let outer = edges.last().map_or(2.0, |e| e.1);
    let scale = (SIZE / 2.0 - MARGIN) / outer;
    let c = SIZE / 2.0;
    let pt = |rad: f64, th: f64| (c + rad * scale * th.cos(), c - rad * scale * th.sin());

    let mut out = String::new();
    header(&mut out, title);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for radius_index in 0..radii.len() {
        let ring: Vec<&MuRow> = rows
            .iter()
            .filter(|row| row.r == radii[radius_index])
            .collect();
        let half = PI / ring.len() as f64;
        let (r0, r1) = edges[radius_index];
        for row in ring {
            let fill = match row.abs_mu {
                Some(v) => {
                    lo = lo.min(v);
                    hi = hi.max(v);
                    mu_colour(v)
                }
                None => EXCLUDED_FILL.to_string(),
            };
            let (a0, a1) = (row.theta - half, row.theta + half);
            let (p0, p1, p2, p3) = (pt(r0, a0), pt(r1, a0), pt(r1, a1), pt(r0, a1));
            let _ = writeln!(
                out,
                r#"<path d="M{:.3} {:.3} L{:.3} {:.3} A{:.3} {:.3} 0 0 0 {:.3} {:.3} L{:.3} {:.3} A{:.3} {:.3} 0 0 1 {:.3} {:.3} Z" fill="{fill}" stroke="{fill}" stroke-width="0.3"/>"#,
                p0.0,
                p0.1,
                p1.0,
                p1.1,
                r1 * scale,
                r1 * scale,
                p2.0,
                p2.1,
                p3.0,
                p3.1,
                r0 * scale,
                r0 * scale,
                p0.0,
                p0.1
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<circle cx="{c}" cy="{c}" r="{:.3}" fill="none" stroke="black" stroke-width="1"/>"#,
        scale
    );
    if lo.is_finite() {
        let _ = writeln!(
            out,
            r#"<text x="10" y="20" font-family="monospace" font-size="12">|mu| in [{lo:.12}, {hi:.12}]</text>"#
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
