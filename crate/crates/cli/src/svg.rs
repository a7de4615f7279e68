//! Schematic drawing of a solved pattern.
//!
//! Faces sit on a circle in index order and are joined through their shared
//! edges (the dual graph). Node size grows with the disk radius. This is a
//! combinatorial picture, not an embedding of the spherical metric.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write;

use circle_pattern::spherical::arccot;
use circle_pattern::{CurvatureVector, PatternGraph};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 90.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_schematic(g: &PatternGraph, k: &CurvatureVector) -> String {
    let n = g.face_count();
    let center = SIZE / 2.0;
    let ring = center - MARGIN;
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let a = TAU * i as f64 / n as f64 - FRAC_PI_2;
            (center + ring * a.cos(), center + ring * a.sin())
        })
        .collect();
    // node radius in px, at most a third of the spacing between neighbours
    let spacing = if n > 1 { ring * (TAU / n as f64).min(1.0) } else { ring };
    let node_max = (spacing / 3.0).clamp(4.0, 40.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(out, "<title>schematic circle pattern, {n} faces</title>");

    let pairs: BTreeSet<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (e.faces[0].0, e.faces[1].0);
            (a.min(b), a.max(b))
        })
        .collect();
    let _ = writeln!(out, r##"<g stroke="#999" stroke-width="1" fill="none">"##);
    for &(a, b) in &pairs {
        let ((x1, y1), (x2, y2)) = (pos[a], pos[b]);
        if a == b {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
                x1,
                y1 - node_max,
                node_max * 0.6
            );
        } else {
            let _ = writeln!(out, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
        }
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g stroke="#246" fill="#cde">"##);
    for f in g.face_indices() {
        let (x, y) = pos[f.0];
        let r = arccot(k.get(f)) / FRAC_PI_2 * node_max;
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}"/>"#, r.max(1.0));
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g text-anchor="middle">"#);
    for f in g.face_indices() {
        let (x, y) = pos[f.0];
        let ky = k.get(f);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}"><tspan x="{x:.2}">{}</tspan><tspan x="{x:.2}" dy="12">k={:.6}</tspan><tspan x="{x:.2}" dy="12">r={:.6}</tspan></text>"#,
            y + node_max + 12.0,
            escape(g.face_id(f)),
            ky,
            arccot(ky)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}
