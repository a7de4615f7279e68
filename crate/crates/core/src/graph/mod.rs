//! Combinatorics of the weighted graph `(G, Θ)` on a closed oriented surface.
//!
//! Faces carry disks, edges carry bigons. Every edge names the two faces whose
//! disks overlap in its bigon; the two may coincide (a disk overlapping
//! itself) and two faces may share several edges. Vertex data is optional:
//! it is needed only for vertex cone angles, the Euler characteristic and the
//! boundary-cycle check.

mod doc;
mod generate;
mod validate;

use std::collections::HashMap;
use std::f64::consts::PI;

pub use doc::{EdgeDoc, FaceDoc, PatternDoc};
pub use generate::generate_torus_grid;
pub use validate::{validate, Diagnostic, Severity, ValidationReport};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceIndex(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIndex(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexIndex(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub ends: Option<[VertexIndex; 2]>,
    pub theta: f64,
    /// The two faces whose disks intersect in this edge's bigon.
    pub faces: [FaceIndex; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: String,
    /// Boundary edges in listed order, with multiplicity.
    pub edges: Vec<EdgeIndex>,
}

/// One entry of a face's boundary: the edge, the disk on the other side and
/// the bigon angle. For a self-adjacent edge the neighbour is the face itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub edge: EdgeIndex,
    pub neighbor: FaceIndex,
    pub theta: f64,
}

/// Validated, indexed pattern graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGraph {
    vertices: Option<Vec<String>>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    incidences: Vec<Vec<Incidence>>,
    face_lookup: HashMap<String, FaceIndex>,
    vertex_lookup: HashMap<String, VertexIndex>,
}

/// Parses a pattern document and builds the graph. Any `targets` field is
/// accepted and ignored here; see [`crate::io::PatternFile`].
pub fn parse_pattern(text: &str) -> Result<PatternGraph> {
    PatternGraph::from_doc(&PatternDoc::from_json(text)?)
}

impl PatternGraph {
    pub fn from_doc(doc: &PatternDoc) -> Result<Self> {
        let report = validate(doc);
        if !report.ok {
            return Err(Error::InvalidPattern(report));
        }

        let face_lookup: HashMap<String, FaceIndex> = doc
            .faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id.clone(), FaceIndex(i)))
            .collect();
        let edge_lookup: HashMap<&str, EdgeIndex> = doc
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.as_str(), EdgeIndex(i)))
            .collect();
        let vertex_lookup: HashMap<String, VertexIndex> = doc
            .vertices
            .iter()
            .flatten()
            .enumerate()
            .map(|(i, v)| (v.clone(), VertexIndex(i)))
            .collect();

        let edges = doc
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                ends: e
                    .v
                    .as_ref()
                    .map(|[a, b]| [vertex_lookup[a], vertex_lookup[b]]),
                theta: e.theta,
                faces: [face_lookup[&e.faces[0]], face_lookup[&e.faces[1]]],
            })
            .collect();
        let faces = doc
            .faces
            .iter()
            .map(|f| Face {
                id: f.id.clone(),
                edges: f.edges.iter().map(|e| edge_lookup[e.as_str()]).collect(),
            })
            .collect();
        Ok(Self::assemble(doc.vertices.clone(), edges, faces, face_lookup, vertex_lookup))
    }

    fn assemble(
        vertices: Option<Vec<String>>,
        edges: Vec<Edge>,
        faces: Vec<Face>,
        face_lookup: HashMap<String, FaceIndex>,
        vertex_lookup: HashMap<String, VertexIndex>,
    ) -> Self {
        let incidences = faces
            .iter()
            .enumerate()
            .map(|(fi, face)| {
                let me = FaceIndex(fi);
                face.edges
                    .iter()
                    .map(|&ei| {
                        let e: &Edge = &edges[ei.0];
                        let neighbor = if e.faces[0] == me { e.faces[1] } else { e.faces[0] };
                        Incidence {
                            edge: ei,
                            neighbor,
                            theta: e.theta,
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            vertices,
            edges,
            faces,
            incidences,
            face_lookup,
            vertex_lookup,
        }
    }

    /// Builds a graph from already-indexed parts. Used by the generators; the
    /// result goes through the same validation as parsed documents.
    pub(crate) fn from_parts(
        vertices: Option<Vec<String>>,
        edges: Vec<Edge>,
        faces: Vec<Face>,
    ) -> Result<Self> {
        let g = Self::assemble(vertices, edges, faces, HashMap::new(), HashMap::new());
        Self::from_doc(&g.to_doc())
    }

    pub fn to_doc(&self) -> PatternDoc {
        PatternDoc {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    v: e.ends.map(|[a, b]| [self.vertex_id(a).to_owned(), self.vertex_id(b).to_owned()]),
                    theta: e.theta,
                    faces: [self.face_id(e.faces[0]).to_owned(), self.face_id(e.faces[1]).to_owned()],
                })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|f| FaceDoc {
                    id: f.id.clone(),
                    edges: f.edges.iter().map(|&e| self.edges[e.0].id.clone()).collect(),
                })
                .collect(),
            targets: None,
        }
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.vertices.as_ref().map(Vec::len)
    }

    pub fn has_vertex_data(&self) -> bool {
        self.vertices.is_some()
    }

    pub fn euler_characteristic(&self) -> Option<i64> {
        self.vertex_count()
            .map(|v| v as i64 - self.edges.len() as i64 + self.faces.len() as i64)
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> Option<&[String]> {
        self.vertices.as_deref()
    }

    pub fn face(&self, f: FaceIndex) -> &Face {
        &self.faces[f.0]
    }

    pub fn edge(&self, e: EdgeIndex) -> &Edge {
        &self.edges[e.0]
    }

    pub fn face_id(&self, f: FaceIndex) -> &str {
        &self.faces[f.0].id
    }

    pub fn vertex_id(&self, v: VertexIndex) -> &str {
        &self.vertices.as_ref().expect("vertex index without vertex data")[v.0]
    }

    pub fn face_index(&self, id: &str) -> Result<FaceIndex> {
        self.face_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownFace(id.to_owned()))
    }

    pub fn vertex_index(&self, id: &str) -> Result<VertexIndex> {
        if self.vertices.is_none() {
            return Err(Error::MissingVertexData);
        }
        self.vertex_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn face_indices(&self) -> impl ExactSizeIterator<Item = FaceIndex> {
        (0..self.faces.len()).map(FaceIndex)
    }

    /// Boundary incidences of `f` in its edge-list order.
    pub fn incidences(&self, f: FaceIndex) -> &[Incidence] {
        &self.incidences[f.0]
    }

    /// Distinct faces other than `f` that share an edge with it, ascending.
    pub fn neighbors(&self, f: FaceIndex) -> Vec<FaceIndex> {
        let mut out: Vec<FaceIndex> = self.incidences[f.0]
            .iter()
            .map(|i| i.neighbor)
            .filter(|&n| n != f)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distinct edges of `f` (the set `E(f)`), ascending.
    pub fn face_edge_set(&self, f: FaceIndex) -> Vec<EdgeIndex> {
        let mut out = self.faces[f.0].edges.clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Σ_{e ∈ E(f)} 2θ_e` over the edge set: the supremum of the total
    /// geodesic curvature face `f` can carry.
    pub fn face_capacity(&self, f: FaceIndex) -> f64 {
        self.face_edge_set(f)
            .into_iter()
            .map(|e| 2.0 * self.edges[e.0].theta)
            .sum()
    }

    /// Number of boundary incidences of the longest face.
    pub fn max_face_degree(&self) -> usize {
        self.incidences.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of edge ends at each vertex (loops count twice).
    pub fn vertex_degrees(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count()?;
        let mut deg = vec![0; n];
        for e in &self.edges {
            if let Some([a, b]) = e.ends {
                deg[a.0] += 1;
                deg[b.0] += 1;
            }
        }
        Some(deg)
    }

    /// Cone angle at a vertex, `Σ (π − θ_e)` over the edge ends at `v`.
    /// An isolated vertex yields 0.
    pub fn vertex_cone_angle(&self, v: VertexIndex) -> f64 {
        self.edges
            .iter()
            .filter_map(|e| e.ends.map(|ends| (ends, e.theta)))
            .map(|([a, b], theta)| {
                let ends = usize::from(a == v) + usize::from(b == v);
                ends as f64 * (PI - theta)
            })
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.theta).sum()
    }
}

/// Cone angle at the vertex named `v`.
pub fn vertex_cone_coefficient(g: &PatternGraph, v: &str) -> Result<f64> {
    let vi = g.vertex_index(v)?;
    let angle = g.vertex_cone_angle(vi);
    if angle == 0.0 {
        log::warn!("vertex `{v}` is isolated");
    }
    Ok(angle)
}
