use std::path::{Path, PathBuf};

use circle_pattern::curvature::total_curvatures;
use circle_pattern::feasibility::{
    check_bruteforce, check_mincut_with_threads, BRUTEFORCE_LIMIT,
};
use circle_pattern::graph::{generate_torus_grid, validate as validate_doc, PatternDoc};
use circle_pattern::io::{check_solution, FeasibilityReport, PatternFile, PatternRef, SolutionFile};
use circle_pattern::solver::{self, Init, SolverConfig, SweepMode};
use circle_pattern::{CurvatureVector, Error, FeasibilityResult, PatternGraph, TargetVector};
use serde::Serialize;

use crate::output::{print_json, read_bytes, read_text, sha256_hex, to_pretty, write_output, CliError};
use crate::svg::render_schematic;
use crate::{FeasibleArgs, Method, Mode, ReportArgs, SolveArgs, TorusArgs};

/// Faces up to which `auto` enumerates subsets instead of running min-cut.
const AUTO_BRUTEFORCE_FACES: usize = 20;

/// Largest slack difference tolerated between the two methods under `--verify`.
const VERIFY_TOL: f64 = 1e-9;

pub fn validate(input: &Path) -> Result<u8, CliError> {
    let text = read_text(input)?;
    let doc = PatternDoc::from_json(&text)?;
    let report = validate_doc(&doc);
    print_json(&report);
    Ok(if report.ok { 0 } else { 1 })
}

fn load_pattern(bytes: &[u8], path: &Path) -> Result<PatternFile, CliError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{} is not valid UTF-8", path.display())))?;
    Ok(PatternFile::parse(text)?)
}

fn require_targets(p: &PatternFile, path: &Path) -> Result<TargetVector, CliError> {
    p.targets
        .clone()
        .ok_or_else(|| CliError::Input(format!("{} has no `targets`", path.display())))
}

fn run_method(
    g: &PatternGraph,
    t: &TargetVector,
    method: Method,
    threads: usize,
) -> Result<FeasibilityResult, CliError> {
    Ok(match method {
        Method::Bruteforce => check_bruteforce(g, t)?,
        Method::Mincut => check_mincut_with_threads(g, t, threads)?,
        Method::Auto if g.face_count() <= AUTO_BRUTEFORCE_FACES => check_bruteforce(g, t)?,
        Method::Auto => check_mincut_with_threads(g, t, threads)?,
    })
}

fn method_name(g: &PatternGraph, method: Method) -> &'static str {
    match method {
        Method::Bruteforce => "bruteforce",
        Method::Mincut => "mincut",
        Method::Auto if g.face_count() <= AUTO_BRUTEFORCE_FACES => "bruteforce",
        Method::Auto => "mincut",
    }
}

pub fn feasible(a: &FeasibleArgs, threads: usize) -> Result<u8, CliError> {
    let p = load_pattern(&read_bytes(&a.input)?, &a.input)?;
    let t = require_targets(&p, &a.input)?;
    let g = &p.graph;
    let result = run_method(g, &t, a.method, threads)?;

    if a.verify {
        if g.face_count() > BRUTEFORCE_LIMIT {
            return Err(CliError::Input(format!(
                "--verify enumerates subsets and is limited to {BRUTEFORCE_LIMIT} faces, pattern has {}",
                g.face_count()
            )));
        }
        let brute = check_bruteforce(g, &t)?;
        let cut = check_mincut_with_threads(g, &t, threads)?;
        if brute.feasible != cut.feasible || (brute.min_slack - cut.min_slack).abs() > VERIFY_TOL {
            return Err(CliError::Internal(format!(
                "bruteforce (feasible {}, slack {:e}) and mincut (feasible {}, slack {:e}) disagree",
                brute.feasible, brute.min_slack, cut.feasible, cut.min_slack
            )));
        }
    }

    print_json(&FeasibilityReport::new(g, method_name(g, a.method), &result));
    Ok(if result.feasible { 0 } else { 1 })
}

fn parse_init(arg: &str, g: &PatternGraph) -> Result<Init, CliError> {
    if arg == "subpattern" {
        return Ok(Init::Subpattern);
    }
    if let Some(k) = arg.strip_prefix("uniform:") {
        let k: f64 = k
            .parse()
            .map_err(|_| CliError::Input(format!("--init uniform:K needs a number, got `{k}`")))?;
        CurvatureVector::uniform(g, k)?;
        return Ok(Init::Uniform(k));
    }
    if let Some(path) = arg.strip_prefix("from:") {
        let sol = SolutionFile::from_json(&read_text(Path::new(path))?)?;
        return Ok(Init::Explicit(CurvatureVector::from_map(g, &sol.curvatures)?));
    }
    Err(CliError::Input(format!(
        "--init must be `subpattern`, `uniform:K` or `from:PATH`, got `{arg}`"
    )))
}

/// Printed instead of the solution when `--output` is given.
#[derive(Serialize)]
struct SolveSummary<'a> {
    status: solver::SolveStatus,
    iterations: usize,
    final_residual: f64,
    output: &'a str,
}

pub fn solve(a: &SolveArgs, threads: usize) -> Result<u8, CliError> {
    let bytes = read_bytes(&a.input)?;
    let p = load_pattern(&bytes, &a.input)?;
    let t = require_targets(&p, &a.input)?;
    let g = &p.graph;
    let config = SolverConfig {
        mode: match a.mode {
            Mode::Jacobi => SweepMode::Jacobi,
            Mode::GaussSeidel => SweepMode::GaussSeidel,
        },
        tol_t: a.tol,
        max_outer: a.max_iter,
        init: parse_init(&a.init, g)?,
        threads,
        ..SolverConfig::default()
    };
    config.validate()?;

    let (k, trace) = match solver::solve(g, &t, &config) {
        Ok(r) => r,
        Err(Error::Infeasible { min_slack, witness }) => {
            let verdict = FeasibilityReport {
                method: method_name(g, Method::Auto).to_owned(),
                feasible: false,
                boundary: min_slack.abs() <= circle_pattern::feasibility::SLACK_EPSILON,
                min_slack,
                witness,
            };
            eprintln!("error: targets are not admissible; no iteration was run");
            print_json(&verdict);
            return Ok(1);
        }
        Err(e @ (Error::TargetOutOfRange { .. } | Error::CurvatureOverflow { .. })) => {
            eprintln!("error: {e}");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    for w in &trace.warnings {
        log::warn!("{w}");
    }

    if let Some(path) = &a.trace {
        let mut lines = String::new();
        for r in &trace.records {
            lines.push_str(&serde_json::to_string(r).expect("trace record serializes"));
            lines.push('\n');
        }
        write_output(path, lines.as_bytes())?;
    }

    let pattern = PatternRef {
        path: a.input.display().to_string(),
        sha256: sha256_hex(&bytes),
    };
    let solution = SolutionFile::new(g, pattern, &t, &k, &config, &trace)?;
    let text = to_pretty(&solution);
    match &a.output {
        Some(path) => {
            write_output(path, text.as_bytes())?;
            print_json(&SolveSummary {
                status: trace.status,
                iterations: trace.iterations(),
                final_residual: trace.final_residual(),
                output: &path.display().to_string(),
            });
        }
        None => print!("{text}"),
    }
    if !trace.status.is_converged() {
        eprintln!("error: no convergence ({:?} after {} iterations)", trace.status, trace.iterations());
    }
    Ok(if trace.status.is_converged() { 0 } else { 1 })
}

/// Recorded pattern paths are taken as given, then relative to the solution.
fn resolve_pattern(recorded: &str, solution: &Path) -> PathBuf {
    let direct = PathBuf::from(recorded);
    if direct.is_absolute() || direct.exists() {
        return direct;
    }
    match solution.parent() {
        Some(dir) => dir.join(recorded),
        None => direct,
    }
}

pub fn report(a: &ReportArgs) -> Result<u8, CliError> {
    let sol = SolutionFile::from_json(&read_text(&a.solution)?)?;
    let pattern_path = match &a.pattern {
        Some(p) => p.clone(),
        None => resolve_pattern(&sol.pattern.path, &a.solution),
    };
    let bytes = read_bytes(&pattern_path)?;
    let digest = sha256_hex(&bytes);
    if digest != sol.pattern.sha256 {
        return Err(CliError::Input(format!(
            "solution was computed for a different pattern: {} has sha256 {digest}, solution records {}",
            pattern_path.display(),
            sol.pattern.sha256
        )));
    }
    let p = load_pattern(&bytes, &pattern_path)?;
    let check = check_solution(&p, &sol)?;
    print_json(&check);
    for f in &check.failures {
        eprintln!("check failed: {f}");
    }

    if let Some(path) = &a.svg {
        let k = CurvatureVector::from_map(&p.graph, &sol.curvatures)?;
        write_output(path, render_schematic(&p.graph, &k).as_bytes())?;
    }
    Ok(if check.ok { 0 } else { 1 })
}

pub fn generate_torus(a: &TorusArgs) -> Result<u8, CliError> {
    let graph = generate_torus_grid(a.n, a.theta)?;
    let targets = match (a.target, a.realize) {
        (Some(t), _) => Some(TargetVector::uniform(&graph, t)?),
        (None, Some(k)) => {
            let k = CurvatureVector::uniform(&graph, k)?;
            Some(TargetVector::new(&graph, total_curvatures(&graph, &k))?)
        }
        (None, None) => None,
    };
    let mut text = PatternFile { graph, targets }.to_json();
    text.push('\n');
    match &a.output {
        Some(path) => write_output(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(0)
}
