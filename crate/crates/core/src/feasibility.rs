//! Admissibility of prescribed total curvatures.
//!
//! A target vector `T̂` is admissible when every nonempty face subset `F′`
//! (including `F` itself) has positive slack
//! `Σ_{e ∈ E(F′)} 2θ_e − Σ_{f ∈ F′} T̂_f`, where `E(F′)` is the *set* of edges
//! touching `F′`. Two independent decision procedures are provided: exhaustive
//! enumeration for small patterns and a max-closure reduction solved with one
//! min-cut per face.

use std::collections::BTreeMap;

use petgraph::algo::dinics;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use rayon::prelude::*;

use crate::graph::{FaceIndex, PatternGraph};
use crate::{Error, Result};

/// Slack at or below this value is not considered strictly positive.
pub const SLACK_EPSILON: f64 = 1e-12;

/// Face count limit for [`check_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 25;

/// Prescribed total geodesic curvature per face.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    values: Vec<f64>,
}

impl TargetVector {
    pub fn new(g: &PatternGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.face_count() {
            return Err(Error::FaceSetMismatch {
                expected: g.face_count(),
                found: values.len(),
            });
        }
        for &t in &values {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Range {
                    quantity: "target",
                    value: t,
                    bound: "finite and > 0",
                });
            }
        }
        Ok(Self { values })
    }

    pub fn uniform(g: &PatternGraph, t: f64) -> Result<Self> {
        Self::new(g, vec![t; g.face_count()])
    }

    pub fn from_map(g: &PatternGraph, map: &BTreeMap<String, f64>) -> Result<Self> {
        if map.len() != g.face_count() {
            return Err(Error::FaceSetMismatch {
                expected: g.face_count(),
                found: map.len(),
            });
        }
        let mut values = vec![0.0; g.face_count()];
        for (id, &t) in map {
            values[g.face_index(id)?.0] = t;
        }
        Self::new(g, values)
    }

    pub fn get(&self, f: FaceIndex) -> f64 {
        self.values[f.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_map(&self, g: &PatternGraph) -> BTreeMap<String, f64> {
        g.face_indices()
            .map(|f| (g.face_id(f).to_owned(), self.values[f.0]))
            .collect()
    }

    /// Scales every entry; used to build infeasible or near-boundary cases.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let values = self.values.iter().map(|t| t * factor).collect();
        Ok(Self { values }).and_then(|t: Self| {
            if t.values.iter().all(|v| v.is_finite() && *v > 0.0) {
                Ok(t)
            } else {
                Err(Error::Range {
                    quantity: "scale",
                    value: factor,
                    bound: "finite and > 0",
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// `|min_slack| ≤ SLACK_EPSILON`: on the boundary, reported infeasible.
    pub boundary: bool,
    pub min_slack: f64,
    /// A nonempty face subset attaining `min_slack`, ascending.
    pub witness: Vec<FaceIndex>,
}

impl FeasibilityResult {
    fn from_slack(min_slack: f64, witness: Vec<FaceIndex>) -> Self {
        Self {
            feasible: min_slack > SLACK_EPSILON,
            boundary: min_slack.abs() <= SLACK_EPSILON,
            min_slack,
            witness,
        }
    }

    pub fn witness_ids(&self, g: &PatternGraph) -> Vec<String> {
        self.witness.iter().map(|&f| g.face_id(f).to_owned()).collect()
    }
}

fn check_len(g: &PatternGraph, t: &TargetVector) -> Result<()> {
    if t.values.len() == g.face_count() {
        Ok(())
    } else {
        Err(Error::FaceSetMismatch {
            expected: g.face_count(),
            found: t.values.len(),
        })
    }
}

/// Slack of one subset, computed from scratch.
pub fn subset_slack(g: &PatternGraph, t: &TargetVector, subset: &[FaceIndex]) -> f64 {
    let mut inside = vec![false; g.face_count()];
    for &f in subset {
        inside[f.0] = true;
    }
    let capacity: f64 = g
        .edges()
        .iter()
        .filter(|e| inside[e.faces[0].0] || inside[e.faces[1].0])
        .map(|e| 2.0 * e.theta)
        .sum();
    let demand: f64 = subset.iter().map(|f| t.values[f.0]).sum();
    capacity - demand
}

fn mask_faces(mask: u64, n: usize) -> Vec<FaceIndex> {
    (0..n).filter(|i| mask >> i & 1 == 1).map(FaceIndex).collect()
}

/// Whether subset `a` precedes subset `b` when both are read as ascending
/// lists of face indices and compared lexicographically.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let p = diff.trailing_zeros();
    let above = if p >= 63 { 0 } else { !0u64 << (p + 1) };
    if a >> p & 1 == 1 {
        // a has p, b continues with something larger or stops
        b & above != 0
    } else {
        a & above == 0
    }
}

/// Exact minimum slack over all `2^|F| − 1` nonempty subsets.
///
/// Subsets are visited in Gray-code order with incremental sums, refreshed
/// from scratch every 4096 steps; the winning subset's slack is recomputed
/// exactly. Ties within [`SLACK_EPSILON`] go to the lexicographically smallest
/// subset.
pub fn check_bruteforce(g: &PatternGraph, t: &TargetVector) -> Result<FeasibilityResult> {
    check_len(g, t)?;
    let n = g.face_count();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooManyFaces {
            faces: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }

    let edge_masks: Vec<u64> = g
        .edges()
        .iter()
        .map(|e| 1u64 << e.faces[0].0 | 1u64 << e.faces[1].0)
        .collect();
    let face_edges: Vec<Vec<usize>> = g
        .face_indices()
        .map(|f| g.face_edge_set(f).into_iter().map(|e| e.0).collect())
        .collect();
    let weights: Vec<f64> = g.edges().iter().map(|e| 2.0 * e.theta).collect();

    let fresh = |mask: u64| -> (f64, f64) {
        let cap = edge_masks
            .iter()
            .zip(&weights)
            .filter(|(m, _)| *m & mask != 0)
            .map(|(_, w)| w)
            .sum();
        let dem = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| t.values[i]).sum();
        (cap, dem)
    };

    let mut mask = 0u64;
    let (mut cap, mut dem) = (0.0, 0.0);
    let mut best_mask = 0u64;
    let mut best = f64::INFINITY;
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let before = mask;
        mask ^= 1 << bit;
        if step % 4096 == 0 {
            (cap, dem) = fresh(mask);
        } else {
            for &e in &face_edges[bit] {
                let was = edge_masks[e] & before != 0;
                let is = edge_masks[e] & mask != 0;
                match (was, is) {
                    (false, true) => cap += weights[e],
                    (true, false) => cap -= weights[e],
                    _ => {}
                }
            }
            if mask >> bit & 1 == 1 {
                dem += t.values[bit];
            } else {
                dem -= t.values[bit];
            }
        }
        let slack = cap - dem;
        if slack < best - SLACK_EPSILON
            || (slack <= best + SLACK_EPSILON && lex_less(mask, best_mask))
        {
            best = best.min(slack);
            best_mask = mask;
        }
    }

    let witness = mask_faces(best_mask, n);
    let exact = subset_slack(g, t, &witness);
    Ok(FeasibilityResult::from_slack(exact, witness))
}

/// Max-closure formulation: for each face `f₀`, the most violated subset
/// containing `f₀` is the source side of a minimum cut in the network
/// `source → face (T̂_f)`, `face → edge (∞)`, `edge → sink (2θ_e)`, with
/// `f₀` tied to the source. Runs in parallel on `threads` workers when
/// `threads > 0`; the result does not depend on the schedule.
pub fn check_mincut_with_threads(
    g: &PatternGraph,
    t: &TargetVector,
    threads: usize,
) -> Result<FeasibilityResult> {
    check_len(g, t)?;
    let n = g.face_count();
    let run = |f0: usize| -> (f64, Vec<FaceIndex>) {
        let selected = most_violated_with(g, t, FaceIndex(f0));
        let slack = subset_slack(g, t, &selected);
        (slack, selected)
    };

    let results: Vec<(f64, Vec<FaceIndex>)> = if threads == 0 {
        (0..n).map(run).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map(|pool| pool.install(|| (0..n).into_par_iter().map(run).collect()))
            .unwrap_or_else(|_| (0..n).map(run).collect())
    };

    // first minimum in face order
    let (slack, witness) = results
        .into_iter()
        .reduce(|best, cand| if cand.0 < best.0 { cand } else { best })
        .expect("pattern has at least one face");
    Ok(FeasibilityResult::from_slack(slack, witness))
}

pub fn check_mincut(g: &PatternGraph, t: &TargetVector) -> Result<FeasibilityResult> {
    check_mincut_with_threads(g, t, 0)
}

fn most_violated_with(g: &PatternGraph, t: &TargetVector, forced: FaceIndex) -> Vec<FaceIndex> {
    let n = g.face_count();
    let m = g.edge_count();
    let total: f64 = t.values.iter().sum::<f64>() + 2.0 * g.total_weight();
    let infinite = 4.0 * total + 1.0;

    // nodes: faces 0..n, edges n..n+m, then source and sink
    let mut net: DiGraph<(), f64> = DiGraph::with_capacity(n + m + 2, 2 * n + 3 * m);
    for _ in 0..n + m + 2 {
        net.add_node(());
    }
    let node = NodeIndex::new;
    let (source, sink) = (node(n + m), node(n + m + 1));
    for f in g.face_indices() {
        let cap = if f == forced { infinite } else { t.values[f.0] };
        net.add_edge(source, node(f.0), cap);
        for e in g.face_edge_set(f) {
            net.add_edge(node(f.0), node(n + e.0), infinite);
        }
    }
    for (i, e) in g.edges().iter().enumerate() {
        net.add_edge(node(n + i), sink, 2.0 * e.theta);
    }
    let (_, flows) = dinics(&net, source, sink);

    // residual reachability from the source; capacities within rounding of
    // saturation count as saturated
    let eps = infinite * 1e-14;
    let mut reach = vec![false; n + m + 2];
    reach[source.index()] = true;
    let mut stack = vec![source];
    while let Some(v) = stack.pop() {
        let forward = net
            .edges_directed(v, petgraph::Direction::Outgoing)
            .filter(|e| *e.weight() - flows[e.id().index()] > eps)
            .map(|e| e.target());
        let backward = net
            .edges_directed(v, petgraph::Direction::Incoming)
            .filter(|e| flows[e.id().index()] > eps)
            .map(|e| e.source());
        for w in forward.chain(backward).collect::<Vec<_>>() {
            if !reach[w.index()] {
                reach[w.index()] = true;
                stack.push(w);
            }
        }
    }
    (0..n).filter(|&f| reach[f]).map(FaceIndex).collect()
}

/// Bruteforce up to 20 faces, min-cut above.
pub fn check_auto(g: &PatternGraph, t: &TargetVector) -> Result<FeasibilityResult> {
    if g.face_count() <= 20 {
        check_bruteforce(g, t)
    } else {
        check_mincut(g, t)
    }
}
