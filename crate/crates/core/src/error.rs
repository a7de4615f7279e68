use thiserror::Error;

use crate::graph::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside its admissible interval.
    #[error("{quantity} = {value} is out of range: must be {bound}")]
    Range {
        quantity: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid pattern: {}", .0.first_error().unwrap_or("unspecified"))]
    InvalidPattern(ValidationReport),

    #[error("unknown face `{0}`")]
    UnknownFace(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("the pattern carries no vertex incidence data")]
    MissingVertexData,

    #[error("face set mismatch: expected {expected} values, got {found}")]
    FaceSetMismatch { expected: usize, found: usize },

    #[error("brute-force feasibility is limited to {limit} faces, pattern has {faces}")]
    TooManyFaces { faces: usize, limit: usize },

    #[error("target vector is not admissible: minimal slack {min_slack:e} on a subset of {} face(s)", witness.len())]
    Infeasible {
        min_slack: f64,
        witness: Vec<String>,
    },

    #[error(
        "target {target} for face `{face}` is outside the solvable interval (0, {upper})"
    )]
    TargetOutOfRange {
        face: String,
        target: f64,
        upper: f64,
    },

    #[error("curvature adjustment for face `{face}` left the representable range")]
    CurvatureOverflow { face: String },

    #[error("solution does not match the pattern: {0}")]
    InvalidSolution(String),

    #[error("torus grid needs n >= 3, got {0}")]
    GridTooSmall(usize),
}
