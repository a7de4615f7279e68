//! Ideal spherical circle patterns on closed oriented surfaces.
//!
//! A pattern is described combinatorially by a [`PatternGraph`]: every face
//! carries a disk, every edge a lens-shaped bigon where two disks overlap at a
//! prescribed angle `θ ∈ (0, π/2]`. Given positive geodesic curvatures for the
//! disks, the geometry of the whole pattern is determined in closed form
//! ([`spherical`], [`curvature`]). The inverse problem, finding curvatures whose
//! boundary circles carry prescribed total geodesic curvatures, is solved by
//! the per-face curvature adjustment iteration in [`solver`], after the
//! prescription has been checked against the subset inequalities in
//! [`feasibility`].
//!
//! ```
//! use circle_pattern::{graph::generate_torus_grid, solver, CurvatureVector, TargetVector};
//! use std::f64::consts::FRAC_PI_2;
//!
//! let g = generate_torus_grid(3, FRAC_PI_2).unwrap();
//! let k_true = CurvatureVector::uniform(&g, 1.0).unwrap();
//! let t = TargetVector::new(&g, circle_pattern::curvature::total_curvatures(&g, &k_true)).unwrap();
//! let (k, trace) = solver::solve(&g, &t, &solver::SolverConfig::default()).unwrap();
//! assert!(trace.status.is_converged());
//! assert!((k.get(circle_pattern::FaceIndex(0)) - 1.0).abs() < 1e-8);
//! ```

pub mod curvature;
mod error;
pub mod feasibility;
pub mod graph;
pub mod io;
pub mod solver;
pub mod spherical;

pub use curvature::{CurvatureVector, GeometryReport};
pub use error::{Error, Result};
pub use feasibility::{FeasibilityResult, TargetVector};
pub use graph::{EdgeIndex, FaceIndex, PatternGraph, VertexIndex};
pub use spherical::{BigonConfig, DiskGeometry, Side};
