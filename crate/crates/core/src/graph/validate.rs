use std::collections::{HashMap, HashSet};
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::doc::PatternDoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Entity the message is about, e.g. `edge e3` or `document`.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
    }

    pub fn first_error(&self) -> Option<&str> {
        self.errors().next().map(|d| d.message.as_str())
    }
}

#[derive(Default)]
struct Collector {
    diagnostics: Vec<Diagnostic>,
}

impl Collector {
    fn error(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, location.into(), message.into());
    }

    fn warning(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Warning, location.into(), message.into());
    }

    fn push(&mut self, severity: Severity, location: String, message: String) {
        self.diagnostics.push(Diagnostic {
            severity,
            location,
            message,
        });
    }
}

fn index_ids<'a>(
    kind: &str,
    ids: impl Iterator<Item = &'a String>,
    out: &mut Collector,
) -> HashMap<&'a str, usize> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id.as_str(), i).is_some() {
            out.error(format!("{kind} {id}"), format!("duplicate {kind} id `{id}`"));
        }
    }
    map
}

/// Checks every structural invariant of a pattern document.
///
/// Never fails; problems are returned as report entries. Simple connectivity
/// of the faces is not checkable from combinatorics alone and is assumed.
pub fn validate(doc: &PatternDoc) -> ValidationReport {
    let mut out = Collector::default();

    if doc.faces.is_empty() {
        out.error("document", "pattern has no faces");
    }
    if doc.edges.is_empty() {
        out.error("document", "pattern has no edges");
    }

    let face_ix = index_ids("face", doc.faces.iter().map(|f| &f.id), &mut out);
    let edge_ix = index_ids("edge", doc.edges.iter().map(|e| &e.id), &mut out);
    let vertex_ix = doc
        .vertices
        .as_ref()
        .map(|vs| index_ids("vertex", vs.iter(), &mut out));

    for e in &doc.edges {
        let loc = format!("edge {}", e.id);
        if !(e.theta > 0.0 && e.theta <= FRAC_PI_2) {
            out.error(
                &loc,
                format!(
                    "edge `{}` has theta = {} outside (0, pi/2]",
                    e.id, e.theta
                ),
            );
        }
        for f in &e.faces {
            if !face_ix.contains_key(f.as_str()) {
                out.error(&loc, format!("edge `{}` references unknown face `{f}`", e.id));
            }
        }
        match (&vertex_ix, &e.v) {
            (Some(vs), Some(ends)) => {
                for v in ends {
                    if !vs.contains_key(v.as_str()) {
                        out.error(&loc, format!("edge `{}` references unknown vertex `{v}`", e.id));
                    }
                }
            }
            (Some(_), None) => {
                out.error(&loc, format!("edge `{}` lacks endpoints while vertices are listed", e.id))
            }
            (None, Some(_)) => out.error(
                &loc,
                format!("edge `{}` lists endpoints but the document has no vertices", e.id),
            ),
            (None, None) => {}
        }
    }

    for f in &doc.faces {
        let loc = format!("face {}", f.id);
        if f.edges.is_empty() {
            out.error(&loc, format!("face `{}` has an empty edge list", f.id));
        }
        for e in &f.edges {
            if !edge_ix.contains_key(e.as_str()) {
                out.error(&loc, format!("face `{}` references unknown edge `{e}`", f.id));
            }
        }
    }

    // Edge e must occur in face f's list as often as f occurs among e's sides.
    let mut listed: HashMap<(&str, &str), usize> = HashMap::new();
    for f in &doc.faces {
        for e in &f.edges {
            *listed.entry((f.id.as_str(), e.as_str())).or_default() += 1;
        }
    }
    let mut sided: HashMap<(&str, &str), usize> = HashMap::new();
    for e in &doc.edges {
        for f in &e.faces {
            *sided.entry((f.as_str(), e.id.as_str())).or_default() += 1;
        }
    }
    let mut pairs: Vec<_> = listed.keys().chain(sided.keys()).copied().collect();
    pairs.sort_unstable();
    pairs.dedup();
    for (f, e) in pairs {
        let a = listed.get(&(f, e)).copied().unwrap_or(0);
        let b = sided.get(&(f, e)).copied().unwrap_or(0);
        if a != b && face_ix.contains_key(f) && edge_ix.contains_key(e) {
            out.error(
                format!("face {f}"),
                format!("edge `{e}` appears {a} time(s) in face `{f}` but names it as a side {b} time(s)"),
            );
        }
    }

    let mut euler = None;
    match (&doc.vertices, &vertex_ix) {
        (Some(vertices), Some(vs)) => {
            let chi = vertices.len() as i64 - doc.edges.len() as i64 + doc.faces.len() as i64;
            euler = Some(chi);
            if chi % 2 != 0 || chi > 2 {
                out.error(
                    "document",
                    format!("Euler characteristic {chi} is not that of a closed oriented surface"),
                );
            }
            let mut degree = vec![0usize; vertices.len()];
            for e in &doc.edges {
                for v in e.v.iter().flatten() {
                    if let Some(&i) = vs.get(v.as_str()) {
                        degree[i] += 1;
                    }
                }
            }
            for (v, d) in vertices.iter().zip(&degree) {
                if *d == 0 {
                    out.warning(format!("vertex {v}"), format!("vertex `{v}` is isolated"));
                }
            }
            check_face_cycles(doc, &edge_ix, &mut out);
        }
        _ => out.warning(
            "document",
            "no vertex data: Euler characteristic and face boundary cycles not checked",
        ),
    }

    if let Some(targets) = &doc.targets {
        for (id, value) in targets {
            if !face_ix.contains_key(id.as_str()) {
                out.error(format!("target {id}"), format!("target given for unknown face `{id}`"));
            }
            if !(value.is_finite() && *value > 0.0) {
                out.error(
                    format!("target {id}"),
                    format!("target for face `{id}` must be finite and > 0, got {value}"),
                );
            }
        }
        for f in &doc.faces {
            if !targets.contains_key(&f.id) {
                out.error(format!("face {}", f.id), format!("face `{}` has no target", f.id));
            }
        }
    }

    let ok = !out.diagnostics.iter().any(|d| d.severity == Severity::Error);
    ValidationReport {
        ok,
        euler_characteristic: euler,
        diagnostics: out.diagnostics,
    }
}

/// A face boundary must be one closed walk through its edges: every endpoint
/// has even degree (loops count twice) and the edges are connected.
fn check_face_cycles(doc: &PatternDoc, edge_ix: &HashMap<&str, usize>, out: &mut Collector) {
    for f in &doc.faces {
        let ends: Vec<&[String; 2]> = f
            .edges
            .iter()
            .filter_map(|e| edge_ix.get(e.as_str()))
            .filter_map(|&i| doc.edges[i].v.as_ref())
            .collect();
        if ends.len() != f.edges.len() || ends.is_empty() {
            continue;
        }
        let mut degree: HashMap<&str, usize> = HashMap::new();
        for [a, b] in ends.iter().copied() {
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        if let Some((v, _)) = degree.iter().find(|(_, d)| *d % 2 != 0) {
            out.error(
                format!("face {}", f.id),
                format!("boundary of face `{}` is not closed at vertex `{v}`", f.id),
            );
            continue;
        }
        // connectivity of the boundary edges through shared endpoints
        let mut seen: HashSet<&str> = HashSet::new();
        let mut stack = vec![ends[0][0].as_str()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            for [a, b] in ends.iter().copied() {
                if a == v {
                    stack.push(b);
                } else if b == v {
                    stack.push(a);
                }
            }
        }
        if seen.len() != degree.len() {
            out.error(
                format!("face {}", f.id),
                format!("boundary of face `{}` splits into several cycles", f.id),
            );
        }
    }
}
