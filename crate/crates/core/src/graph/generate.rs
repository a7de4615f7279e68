use super::{Edge, EdgeIndex, Face, FaceIndex, PatternGraph, VertexIndex};
use crate::spherical::check_theta;
use crate::{Error, Result};

/// `n × n` square grid on the torus with uniform edge weight.
///
/// Vertex `(i, j)` is `v{i}_{j}`. Horizontal edge `eh{i}_{j}` joins `(i, j)`
/// and `(i, j+1)` and separates faces `(i−1, j)` and `(i, j)`; vertical edge
/// `ev{i}_{j}` joins `(i, j)` and `(i+1, j)` and separates faces `(i, j−1)`
/// and `(i, j)`. Face `f{i}_{j}` has corners `(i, j)`, `(i, j+1)`,
/// `(i+1, j+1)`, `(i+1, j)`. All indices wrap modulo `n`, faces are listed
/// row-major.
pub fn generate_torus_grid(n: usize, theta: f64) -> Result<PatternGraph> {
    if n < 3 {
        return Err(Error::GridTooSmall(n));
    }
    check_theta(theta)?;

    let idx = |i: usize, j: usize| (i % n) * n + (j % n);
    let vertices = (0..n * n)
        .map(|p| format!("v{}_{}", p / n, p % n))
        .collect();

    let mut edges = Vec::with_capacity(2 * n * n);
    // horizontal edges occupy 0..n², vertical edges n²..2n²
    for i in 0..n {
        for j in 0..n {
            edges.push(Edge {
                id: format!("eh{i}_{j}"),
                ends: Some([VertexIndex(idx(i, j)), VertexIndex(idx(i, j + 1))]),
                theta,
                faces: [FaceIndex(idx(i + n - 1, j)), FaceIndex(idx(i, j))],
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            edges.push(Edge {
                id: format!("ev{i}_{j}"),
                ends: Some([VertexIndex(idx(i, j)), VertexIndex(idx(i + 1, j))]),
                theta,
                faces: [FaceIndex(idx(i, j + n - 1)), FaceIndex(idx(i, j))],
            });
        }
    }

    let faces = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| Face {
            id: format!("f{i}_{j}"),
            edges: vec![
                EdgeIndex(idx(i, j)),
                EdgeIndex(n * n + idx(i, j + 1)),
                EdgeIndex(idx(i + 1, j)),
                EdgeIndex(n * n + idx(i, j)),
            ],
        })
        .collect();

    PatternGraph::from_parts(Some(vertices), edges, faces)
}
