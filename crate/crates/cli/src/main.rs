//! `cps`: batch front end for the circle pattern solver.
//!
//! Exit codes: 0 success, 1 domain-negative result (invalid pattern,
//! infeasible targets, no convergence, failed check), 2 input error,
//! 3 internal inconsistency.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::{write_atomic, CliError};

#[derive(Debug, Parser)]
#[command(name = "cps", version, about = "Ideal spherical circle patterns from prescribed curvatures")]
struct Cli {
    /// Also write the run manifest to this file.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a pattern file for structural problems.
    Validate {
        input: PathBuf,
    },
    /// Test the targets of a pattern file against the subset inequalities.
    Feasible(FeasibleArgs),
    /// Compute curvatures realizing the targets.
    Solve(SolveArgs),
    /// Recompute and check the geometry of a solution file.
    Report(ReportArgs),
    /// Emit generated fixtures.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Bruteforce,
    Mincut,
}

#[derive(Debug, Args, Serialize)]
pub struct FeasibleArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    /// Run both methods and fail with exit 3 if they disagree.
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Jacobi,
    GaussSeidel,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Jacobi)]
    mode: Mode,
    /// Stop once the sup-norm of the total curvature residual is below this.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Start vector: `subpattern`, `uniform:K`, or `from:PATH` (curvatures of a solution file).
    #[arg(long, default_value = "subpattern")]
    init: String,
    /// Write one JSON line per iteration here.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Solution file; printed to standard output when omitted.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    solution: PathBuf,
    /// Pattern file to check against instead of the one recorded in the solution.
    #[arg(long, value_name = "PATH")]
    pattern: Option<PathBuf>,
    /// Write a schematic SVG of the pattern here.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenerateKind {
    /// n × n quadrilateral grid on the torus with uniform angle θ.
    Torus(TorusArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TorusArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    theta: f64,
    /// Uniform target for every face.
    #[arg(long, conflicts_with = "realize")]
    target: Option<f64>,
    /// Targets realized by this uniform curvature.
    #[arg(long, value_name = "K")]
    realize: Option<f64>,
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

/// One record per run, success or failure.
#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    inputs: Vec<String>,
    config: serde_json::Value,
    version: &'static str,
    wall_time_s: f64,
    status: &'static str,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn status_name(code: u8) -> &'static str {
    match code {
        0 => "ok",
        1 => "negative",
        2 => "input-error",
        _ => "internal-error",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let started = Instant::now();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            let manifest = RunManifest {
                command: "none".into(),
                inputs: Vec::new(),
                config: serde_json::Value::Null,
                version: env!("CARGO_PKG_VERSION"),
                wall_time_s: started.elapsed().as_secs_f64(),
                status: status_name(code),
                exit_code: code,
                error: (code != 0).then(|| e.kind().to_string()),
            };
            emit_manifest(&manifest, None);
            return ExitCode::from(code);
        }
    };

    let (name, inputs, config) = describe(&cli.command);
    let result = threads().and_then(|threads| match &cli.command {
        Command::Validate { input } => commands::validate(input),
        Command::Feasible(a) => commands::feasible(a, threads),
        Command::Solve(a) => commands::solve(a, threads),
        Command::Report(a) => commands::report(a),
        Command::Generate {
            kind: GenerateKind::Torus(a),
        } => commands::generate_torus(a),
    });
    let (code, error) = match result {
        Ok(code) => (code, None),
        Err(e) => {
            eprintln!("error: {e}");
            (e.exit_code(), Some(e.to_string()))
        }
    };
    let manifest = RunManifest {
        command: name.into(),
        inputs,
        config,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_s: started.elapsed().as_secs_f64(),
        status: status_name(code),
        exit_code: code,
        error,
    };
    emit_manifest(&manifest, cli.manifest.as_deref());
    ExitCode::from(code)
}

fn describe(command: &Command) -> (&'static str, Vec<String>, serde_json::Value) {
    let path = |p: &PathBuf| p.display().to_string();
    match command {
        Command::Validate { input } => ("validate", vec![path(input)], serde_json::json!({})),
        Command::Feasible(a) => ("feasible", vec![path(&a.input)], value(a)),
        Command::Solve(a) => ("solve", vec![path(&a.input)], value(a)),
        Command::Report(a) => {
            let mut inputs = vec![path(&a.solution)];
            inputs.extend(a.pattern.as_ref().map(path));
            ("report", inputs, value(a))
        }
        Command::Generate {
            kind: GenerateKind::Torus(a),
        } => ("generate torus", Vec::new(), value(a)),
    }
}

fn value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// Worker threads from `CPS_THREADS`; unset or 0 means sequential.
fn threads() -> Result<usize, CliError> {
    match std::env::var("CPS_THREADS") {
        Err(_) => Ok(0),
        Ok(s) if s.trim().is_empty() => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("CPS_THREADS must be a nonnegative integer, got `{s}`"))),
    }
}

fn emit_manifest(manifest: &RunManifest, path: Option<&std::path::Path>) {
    let line = serde_json::to_string(manifest).expect("manifest serializes");
    eprintln!("{line}");
    if let Some(path) = path {
        if let Err(e) = write_atomic(path, format!("{line}\n").as_bytes()) {
            eprintln!("error: cannot write manifest: {e}");
        }
    }
}
