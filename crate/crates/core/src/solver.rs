//! Curvature-adjustment iteration.
//!
//! Each sweep replaces every face curvature `k_f` by the unique value for
//! which the face's total geodesic curvature equals its target while all
//! other curvatures stay fixed. Started from a subpattern (`T ≤ T̂`) the
//! iterates increase monotonically to the unique solution; near the solution
//! the map is a contraction in `u = ln k`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{face_total, row_partials, totals_raw, CurvatureVector};
use crate::feasibility::{self, TargetVector};
use crate::graph::{FaceIndex, PatternGraph};
use crate::spherical::{self, CURVATURE_MAX, CURVATURE_MIN};
use crate::{Error, Result};

/// Componentwise slack used for the monotonicity flags.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Bracket width in `u` below which the inner solve switches to Newton.
const NEWTON_WIDTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Every face adjusted against the same frozen vector.
    #[default]
    Jacobi,
    /// Faces adjusted one after another in index order, each seeing earlier updates.
    GaussSeidel,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    /// Uniform curvature small enough that every arc total is at most `m/d`.
    #[default]
    Subpattern,
    Uniform(f64),
    Explicit(CurvatureVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: SweepMode,
    /// Stop once `‖T(k) − T̂‖_∞ < tol_t`.
    pub tol_t: f64,
    /// Inner root-find tolerance on `u`.
    pub tol_inner: f64,
    pub max_outer: usize,
    pub init: Init,
    /// Worker threads for Jacobi sweeps; 0 runs sequentially.
    pub threads: usize,
    /// Keep a copy of every iterate in the trace.
    pub snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: SweepMode::Jacobi,
            tol_t: 1e-10,
            tol_inner: 1e-13,
            max_outer: 100_000,
            init: Init::Subpattern,
            threads: 0,
            snapshots: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (quantity, value) in [("tol_t", self.tol_t), ("tol_inner", self.tol_inner)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Range {
                    quantity,
                    value,
                    bound: "finite and > 0",
                });
            }
        }
        if self.max_outer == 0 {
            return Err(Error::Range {
                quantity: "max_outer",
                value: 0.0,
                bound: ">= 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `‖T(k^m) − T̂‖_∞` after this sweep.
    pub residual: f64,
    /// Fixed-point residual `‖u^m − u^{m−1}‖_∞ = ‖Ψ(u^{m−1}) − u^{m−1}‖_∞`
    /// in Jacobi mode; the contraction bound applies to this quantity.
    pub step_norm: f64,
    /// Smallest and largest relative change `(k^m − k^{m−1}) / k^{m−1}`.
    pub min_step: f64,
    pub max_step: f64,
    pub monotone_up: bool,
    pub monotone_down: bool,
    /// `max_f (T_f − T̂_f)`; nonpositive while the iterate is a subpattern.
    pub max_excess: f64,
    /// Row-wise contraction estimate of this sweep.
    pub contraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// A sweep left the curvatures bit-for-bit unchanged above tolerance.
    Stagnated,
    Error,
}

impl SolveStatus {
    pub fn is_converged(self) -> bool {
        self == SolveStatus::Converged
    }
}

/// How the starting vector relates to the targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Subpattern,
    Superpattern,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace {
    pub status: SolveStatus,
    pub mode: SweepMode,
    pub start: StartKind,
    pub initial_residual: f64,
    pub records: Vec<IterationRecord>,
    pub warnings: Vec<String>,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_residual, |r| r.residual)
    }

    pub fn residuals(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.residual)
    }
}

fn check_lengths(g: &PatternGraph, k: &CurvatureVector, t: &TargetVector) -> Result<()> {
    for found in [k.len(), t.values().len()] {
        if found != g.face_count() {
            return Err(Error::FaceSetMismatch {
                expected: g.face_count(),
                found,
            });
        }
    }
    Ok(())
}

fn sup_residual(totals: &[f64], t: &[f64]) -> f64 {
    totals
        .iter()
        .zip(t)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// `d`: the largest number of arcs on one face boundary, or of edges at one
/// vertex when vertex data is present. Using the face count guarantees that
/// arc totals bounded by `m/d` sum to at most `m` on every face.
fn degree_bound(g: &PatternGraph) -> usize {
    let vertex = g
        .vertex_degrees()
        .and_then(|d| d.into_iter().max())
        .unwrap_or(0);
    g.max_face_degree().max(vertex).max(1)
}

fn uniform_subpattern(g: &PatternGraph, t: &TargetVector) -> Result<CurvatureVector> {
    let m = t.values().iter().copied().fold(f64::INFINITY, f64::min);
    let bound = m / degree_bound(g) as f64;
    let max_theta = g.edges().iter().map(|e| e.theta).fold(0.0, f64::max);
    let mut k = 1.0;
    // uniform k: every arc equals arc_curvature(k, k, θ), increasing in θ
    while spherical::arc_curvature(k, k, max_theta) > bound {
        k *= 0.5;
        if k < CURVATURE_MIN {
            return Err(Error::Range {
                quantity: "initial curvature",
                value: k,
                bound: ">= 1e-300",
            });
        }
    }
    CurvatureVector::uniform(g, k)
}

/// Uniform starting curvature with `T(k⁰) ≤ T̂` for every face.
///
/// Fails with [`Error::Infeasible`] when the targets are not admissible.
pub fn initial_subpattern(g: &PatternGraph, t: &TargetVector) -> Result<CurvatureVector> {
    require_feasible(g, t)?;
    uniform_subpattern(g, t)
}

fn require_feasible(g: &PatternGraph, t: &TargetVector) -> Result<()> {
    let verdict = feasibility::check_auto(g, t)?;
    if verdict.feasible {
        Ok(())
    } else {
        Err(Error::Infeasible {
            min_slack: verdict.min_slack,
            witness: verdict.witness_ids(g),
        })
    }
}

/// Solves `T_f(k with k_f = x) = target` for `x`, monotone in `u = ln x`.
fn adjust_raw(
    g: &PatternGraph,
    k: &[f64],
    f: FaceIndex,
    target: f64,
    tol_inner: f64,
) -> Result<f64> {
    let upper = g.face_capacity(f);
    if !(target > 0.0 && target < upper) {
        return Err(Error::TargetOutOfRange {
            face: g.face_id(f).to_owned(),
            target,
            upper,
        });
    }
    let h = |u: f64| face_total(g, k, f, u.exp()) - target;
    let u_min = CURVATURE_MIN.ln();
    let u_max = CURVATURE_MAX.ln();
    let overflow = || Error::CurvatureOverflow {
        face: g.face_id(f).to_owned(),
    };

    let u0 = k[f.0].ln();
    let h0 = h(u0);
    if h0 == 0.0 {
        return Ok(k[f.0]);
    }
    // geometric bracket expansion away from the current value
    let (mut lo, mut hi);
    let mut step = 1.0;
    if h0 < 0.0 {
        lo = u0;
        hi = u0;
        loop {
            hi = (hi + step).min(u_max);
            if h(hi) >= 0.0 {
                break;
            }
            if hi >= u_max {
                return Err(overflow());
            }
            lo = hi;
            step *= 2.0;
        }
    } else {
        hi = u0;
        lo = u0;
        loop {
            lo = (lo - step).max(u_min);
            if h(lo) <= 0.0 {
                break;
            }
            if lo <= u_min {
                return Err(overflow());
            }
            hi = lo;
            step *= 2.0;
        }
    }

    while hi - lo > NEWTON_WIDTH {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // safeguarded Newton inside the bracket
    let mut u = 0.5 * (lo + hi);
    for _ in 0..100 {
        let val = h(u);
        if val == 0.0 {
            return Ok(u.exp());
        }
        if val < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let (diag, _) = row_partials(g, k, f, u.exp());
        let mut next = u - val / diag;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - u).abs() <= tol_inner || hi - lo <= tol_inner;
        u = next;
        if done || next == lo || next == hi {
            break;
        }
    }
    Ok(u.exp())
}

/// New curvature of face `f` making its total equal `target`, all other
/// curvatures held fixed.
pub fn adjust_face(
    g: &PatternGraph,
    k: &CurvatureVector,
    f: FaceIndex,
    target: f64,
) -> Result<f64> {
    if k.len() != g.face_count() {
        return Err(Error::FaceSetMismatch {
            expected: g.face_count(),
            found: k.len(),
        });
    }
    adjust_raw(g, k.values(), f, target, SolverConfig::default().tol_inner)
}

fn sweep(
    g: &PatternGraph,
    k: &[f64],
    t: &[f64],
    mode: SweepMode,
    tol_inner: f64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<f64>> {
    match mode {
        SweepMode::Jacobi => {
            let adjust = |i: usize| adjust_raw(g, k, FaceIndex(i), t[i], tol_inner);
            match pool {
                Some(pool) => pool.install(|| (0..k.len()).into_par_iter().map(adjust).collect()),
                None => (0..k.len()).map(adjust).collect(),
            }
        }
        SweepMode::GaussSeidel => {
            let mut next = k.to_vec();
            for i in 0..k.len() {
                next[i] = adjust_raw(g, &next, FaceIndex(i), t[i], tol_inner)?;
            }
            Ok(next)
        }
    }
}

/// One sweep of the iteration map.
pub fn iterate_once(
    g: &PatternGraph,
    k: &CurvatureVector,
    t: &TargetVector,
    mode: SweepMode,
) -> Result<CurvatureVector> {
    check_lengths(g, k, t)?;
    let tol = SolverConfig::default().tol_inner;
    let next = sweep(g, k.values(), t.values(), mode, tol, None)?;
    Ok(CurvatureVector::from_trusted(next))
}

/// `max_i Σ_{j≠i} |∂T_i/∂u_j| / ∂T_i/∂u_i`, row `i` evaluated with its own
/// curvature replaced by the adjusted value `ψ_i(u)`.
pub fn estimate_contraction(
    g: &PatternGraph,
    k: &CurvatureVector,
    t: &TargetVector,
) -> Result<f64> {
    check_lengths(g, k, t)?;
    let tol = SolverConfig::default().tol_inner;
    let adjusted = sweep(g, k.values(), t.values(), SweepMode::Jacobi, tol, None)?;
    let lambda = contraction_at(g, k.values(), &adjusted);
    if lambda >= 1.0 {
        log::warn!("contraction estimate {lambda} is not below 1 at this point");
    }
    Ok(lambda)
}

fn contraction_at(g: &PatternGraph, k: &[f64], adjusted: &[f64]) -> f64 {
    g.face_indices()
        .map(|f| {
            let (diag, off) = row_partials(g, k, f, adjusted[f.0]);
            off / diag
        })
        .fold(0.0, f64::max)
}

/// Componentwise maximum of two curvature vectors.
pub fn merge_max(k1: &CurvatureVector, k2: &CurvatureVector) -> Result<CurvatureVector> {
    if k1.len() != k2.len() {
        return Err(Error::FaceSetMismatch {
            expected: k1.len(),
            found: k2.len(),
        });
    }
    let values = k1
        .values()
        .iter()
        .zip(k2.values())
        .map(|(a, b)| a.max(*b))
        .collect();
    Ok(CurvatureVector::from_trusted(values))
}

/// Whether `T(k) ≤ T̂ + slack` componentwise.
pub fn is_subpattern(g: &PatternGraph, k: &CurvatureVector, t: &TargetVector, slack: f64) -> bool {
    totals_raw(g, k.values())
        .iter()
        .zip(t.values())
        .all(|(a, b)| *a <= b + slack)
}

/// Runs the iteration to convergence after checking admissibility.
///
/// Non-convergence is reported in the trace status, not as an error; the
/// returned vector is the last iterate.
pub fn solve(
    g: &PatternGraph,
    t: &TargetVector,
    config: &SolverConfig,
) -> Result<(CurvatureVector, SolveTrace)> {
    config.validate()?;
    if t.values().len() != g.face_count() {
        return Err(Error::FaceSetMismatch {
            expected: g.face_count(),
            found: t.values().len(),
        });
    }
    require_feasible(g, t)?;

    let start = match &config.init {
        Init::Subpattern => uniform_subpattern(g, t)?,
        Init::Uniform(k0) => CurvatureVector::uniform(g, *k0)?,
        Init::Explicit(k0) => {
            check_lengths(g, k0, t)?;
            k0.clone()
        }
    };
    let tv = t.values();
    let totals = totals_raw(g, start.values());
    let initial_residual = sup_residual(&totals, tv);
    let below = totals.iter().zip(tv).all(|(a, b)| a <= b);
    let above = totals.iter().zip(tv).all(|(a, b)| a >= b);
    let start_kind = match (below, above) {
        (true, _) => StartKind::Subpattern,
        (false, true) => StartKind::Superpattern,
        _ => StartKind::Mixed,
    };

    let pool = if config.threads > 0 && config.mode == SweepMode::Jacobi {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .ok()
    } else {
        None
    };

    let mut trace = SolveTrace {
        status: SolveStatus::MaxIterations,
        mode: config.mode,
        start: start_kind,
        initial_residual,
        records: Vec::new(),
        warnings: Vec::new(),
    };
    let mut k = start.values().to_vec();
    if initial_residual < config.tol_t {
        trace.status = SolveStatus::Converged;
        return Ok((CurvatureVector::from_trusted(k), trace));
    }

    let mut stagnation_warned = false;
    let mut contraction_warned = false;
    for iteration in 1..=config.max_outer {
        let next = match sweep(g, &k, tv, config.mode, config.tol_inner, pool.as_ref()) {
            Ok(next) => next,
            Err(e) => {
                trace.status = SolveStatus::Error;
                trace.warnings.push(format!("iteration {iteration}: {e}"));
                break;
            }
        };
        let totals = totals_raw(g, &next);
        let residual = sup_residual(&totals, tv);
        let (mut min_step, mut max_step, mut max_du) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for (a, b) in k.iter().zip(&next) {
            let rel = (b - a) / a;
            min_step = min_step.min(rel);
            max_step = max_step.max(rel);
            max_du = max_du.max((b.ln() - a.ln()).abs());
        }
        let max_excess = totals
            .iter()
            .zip(tv)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        let contraction = match config.mode {
            SweepMode::Jacobi => contraction_at(g, &k, &next),
            // sequential rows see partially updated vectors; evaluate at the
            // result with each row's own value frozen
            SweepMode::GaussSeidel => contraction_at(g, &next, &next),
        };
        if contraction >= 1.0 && !contraction_warned {
            contraction_warned = true;
            trace.warnings.push(format!(
                "iteration {iteration}: contraction estimate {contraction} is not below 1"
            ));
        }
        trace.records.push(IterationRecord {
            iteration,
            residual,
            step_norm: max_du,
            min_step,
            max_step,
            monotone_up: min_step >= -MONOTONE_SLACK,
            monotone_down: max_step <= MONOTONE_SLACK,
            max_excess,
            contraction,
            snapshot: config.snapshots.then(|| next.clone()),
        });
        let unchanged = next == k;
        k = next;
        if residual < config.tol_t {
            trace.status = SolveStatus::Converged;
            break;
        }
        if max_du <= config.tol_inner && !stagnation_warned {
            stagnation_warned = true;
            trace.warnings.push(format!(
                "iteration {iteration}: u changed by at most {max_du:e} with residual {residual:e}"
            ));
        }
        if unchanged {
            trace.status = SolveStatus::Stagnated;
            break;
        }
    }
    for w in &trace.warnings {
        log::warn!("{w}");
    }
    Ok((CurvatureVector::from_trusted(k), trace))
}
