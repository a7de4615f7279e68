//! File-level data: pattern files with targets, solution files and the
//! serializable reports printed by the command-line tool.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curvature::{gauss_bonnet_report, total_curvatures, CurvatureVector, GeometryReport};
use crate::feasibility::{FeasibilityResult, TargetVector};
use crate::graph::{PatternDoc, PatternGraph};
use crate::solver::{Init, SolveStatus, SolveTrace, SolverConfig, StartKind, SweepMode};
use crate::spherical::arccot;
use crate::{Error, Result};

/// Conservation tolerances applied when checking a solution.
pub const BIGON_IDENTITY_TOL: f64 = 1e-10;
pub const GAUSS_BONNET_TOL: f64 = 1e-9;

/// A parsed pattern document together with its optional targets.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternFile {
    pub graph: PatternGraph,
    pub targets: Option<TargetVector>,
}

impl PatternFile {
    pub fn parse(text: &str) -> Result<Self> {
        let doc = PatternDoc::from_json(text)?;
        let graph = PatternGraph::from_doc(&doc)?;
        let targets = doc
            .targets
            .as_ref()
            .map(|m| TargetVector::from_map(&graph, m))
            .transpose()?;
        Ok(Self { graph, targets })
    }

    pub fn to_json(&self) -> String {
        let mut doc = self.graph.to_doc();
        doc.targets = self.targets.as_ref().map(|t| t.to_map(&self.graph));
        doc.to_json()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub method: String,
    pub feasible: bool,
    pub boundary: bool,
    pub min_slack: f64,
    pub witness: Vec<String>,
}

impl FeasibilityReport {
    pub fn new(g: &PatternGraph, method: &str, r: &FeasibilityResult) -> Self {
        Self {
            method: method.to_owned(),
            feasible: r.feasible,
            boundary: r.boundary,
            min_slack: r.min_slack,
            witness: r.witness_ids(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRef {
    pub path: String,
    /// Lowercase hex SHA-256 of the pattern file bytes.
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub mode: SweepMode,
    pub tol_t: f64,
    pub tol_inner: f64,
    pub max_outer: usize,
    pub init: String,
    pub threads: usize,
}

impl From<&SolverConfig> for ConfigSummary {
    fn from(c: &SolverConfig) -> Self {
        let init = match &c.init {
            Init::Subpattern => "subpattern".to_owned(),
            Init::Uniform(k) => format!("uniform:{k}"),
            Init::Explicit(_) => "explicit".to_owned(),
        };
        Self {
            mode: c.mode,
            tol_t: c.tol_t,
            tol_inner: c.tol_inner,
            max_outer: c.max_outer,
            init,
            threads: c.threads,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub iterations: usize,
    pub start: StartKind,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub max_contraction: f64,
    pub monotone_up: bool,
    pub monotone_down: bool,
    pub warnings: Vec<String>,
}

impl From<&SolveTrace> for TraceSummary {
    fn from(t: &SolveTrace) -> Self {
        Self {
            iterations: t.iterations(),
            start: t.start,
            initial_residual: t.initial_residual,
            final_residual: t.final_residual(),
            max_contraction: t.records.iter().map(|r| r.contraction).fold(0.0, f64::max),
            monotone_up: t.records.iter().all(|r| r.monotone_up),
            monotone_down: t.records.iter().all(|r| r.monotone_down),
            warnings: t.warnings.clone(),
        }
    }
}

/// Output of a solve: curvatures, radii, targets and the geometry they produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub pattern: PatternRef,
    pub status: SolveStatus,
    pub curvatures: BTreeMap<String, f64>,
    pub radii: BTreeMap<String, f64>,
    pub targets: BTreeMap<String, f64>,
    pub config: ConfigSummary,
    pub trace: TraceSummary,
    pub geometry: GeometryReport,
}

impl SolutionFile {
    pub fn new(
        g: &PatternGraph,
        pattern: PatternRef,
        t: &TargetVector,
        k: &CurvatureVector,
        config: &SolverConfig,
        trace: &SolveTrace,
    ) -> Result<Self> {
        let radii = g
            .face_indices()
            .map(|f| (g.face_id(f).to_owned(), arccot(k.get(f))))
            .collect();
        Ok(Self {
            pattern,
            status: trace.status,
            curvatures: k.to_map(g),
            radii,
            targets: t.to_map(g),
            config: config.into(),
            trace: trace.into(),
            geometry: gauss_bonnet_report(g, k)?,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}

/// Outcome of re-deriving a solution's claims from its curvatures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionCheck {
    pub ok: bool,
    pub residual: f64,
    pub failures: Vec<String>,
    pub geometry: GeometryReport,
}

/// Recomputes geometry from the stored curvatures and checks it against the
/// pattern.
///
/// Structural mismatches (face sets, targets) are errors; numerical
/// disagreements are reported as failures in the returned check.
pub fn check_solution(p: &PatternFile, sol: &SolutionFile) -> Result<SolutionCheck> {
    let g = &p.graph;
    let k = CurvatureVector::from_map(g, &sol.curvatures)?;
    let t = TargetVector::from_map(g, &sol.targets)?;
    if let Some(expected) = &p.targets {
        if expected != &t {
            return Err(Error::InvalidSolution(
                "solution targets differ from the pattern's targets".into(),
            ));
        }
    }
    if sol.radii.len() != g.face_count() {
        return Err(Error::FaceSetMismatch {
            expected: g.face_count(),
            found: sol.radii.len(),
        });
    }

    let mut failures = Vec::new();
    for f in g.face_indices() {
        let id = g.face_id(f);
        let r = *sol
            .radii
            .get(id)
            .ok_or_else(|| Error::UnknownFace(id.to_owned()))?;
        let expected = arccot(k.get(f));
        if (r - expected).abs() > 1e-12 * expected.max(1.0) {
            failures.push(format!("face `{id}`: radius {r} is not arccot of its curvature"));
        }
    }

    let totals = total_curvatures(g, &k);
    let residual = totals
        .iter()
        .zip(t.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if sol.status == SolveStatus::Converged && !(residual < sol.config.tol_t) {
        failures.push(format!(
            "total curvature residual {residual:e} exceeds the solve tolerance {:e}",
            sol.config.tol_t
        ));
    }

    let geometry = gauss_bonnet_report(g, &k)?;
    if !(geometry.global.bigon_identity_residual < BIGON_IDENTITY_TOL) {
        failures.push(format!(
            "bigon area identity residual {:e}",
            geometry.global.bigon_identity_residual
        ));
    }
    if let Some(gb) = geometry.global.gauss_bonnet_residual {
        if !(gb < GAUSS_BONNET_TOL) {
            failures.push(format!("Gauss-Bonnet residual {gb:e}"));
        }
    }
    if !(geometry.min_bigon_area() > 0.0) {
        failures.push("a bigon has nonpositive area".into());
    }
    Ok(SolutionCheck {
        ok: failures.is_empty(),
        residual,
        failures,
        geometry,
    })
}
