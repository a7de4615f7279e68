//! Pattern-wide geometry: per-face total geodesic curvatures, their Jacobian in
//! logarithmic coordinates, cone angles, areas and conservation residuals.
//!
//! Face sums are accumulated in the face's edge-list order, so results do not
//! depend on how faces are scheduled.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::graph::{FaceIndex, PatternGraph};
use crate::spherical::{self, arccot, check_curvature};
use crate::{Error, Result};

/// Geodesic curvature per face, indexed by [`FaceIndex`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureVector {
    values: Vec<f64>,
}

impl CurvatureVector {
    pub fn new(g: &PatternGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.face_count() {
            return Err(Error::FaceSetMismatch {
                expected: g.face_count(),
                found: values.len(),
            });
        }
        for &k in &values {
            check_curvature("curvature", k)?;
        }
        Ok(Self { values })
    }

    pub fn uniform(g: &PatternGraph, k: f64) -> Result<Self> {
        Self::new(g, vec![k; g.face_count()])
    }

    /// From logarithmic coordinates `u = ln k`.
    pub fn from_log(g: &PatternGraph, u: &[f64]) -> Result<Self> {
        Self::new(g, u.iter().map(|x| x.exp()).collect())
    }

    pub fn from_map(g: &PatternGraph, map: &BTreeMap<String, f64>) -> Result<Self> {
        if map.len() != g.face_count() {
            return Err(Error::FaceSetMismatch {
                expected: g.face_count(),
                found: map.len(),
            });
        }
        let mut values = vec![0.0; g.face_count()];
        for (id, &k) in map {
            values[g.face_index(id)?.0] = k;
        }
        Self::new(g, values)
    }

    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn get(&self, f: FaceIndex) -> f64 {
        self.values[f.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_values(&self) -> Vec<f64> {
        self.values.iter().map(|k| k.ln()).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.values.iter().map(|&k| arccot(k)).collect()
    }

    pub fn to_map(&self, g: &PatternGraph) -> BTreeMap<String, f64> {
        g.face_indices()
            .map(|f| (g.face_id(f).to_owned(), self.values[f.0]))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_len(g: &PatternGraph, k: &CurvatureVector) -> Result<()> {
    if k.len() == g.face_count() {
        Ok(())
    } else {
        Err(Error::FaceSetMismatch {
            expected: g.face_count(),
            found: k.len(),
        })
    }
}

/// `T_f` for one face with its own curvature replaced by `own`.
pub(crate) fn face_total(g: &PatternGraph, k: &[f64], f: FaceIndex, own: f64) -> f64 {
    g.incidences(f)
        .iter()
        .map(|inc| {
            let other = if inc.neighbor == f { own } else { k[inc.neighbor.0] };
            spherical::arc_curvature(own, other, inc.theta)
        })
        .sum()
}

/// `(∂T_f/∂u_f, Σ_{j≠f} |∂T_f/∂u_j|)` with `k_f` replaced by `own`.
pub(crate) fn row_partials(g: &PatternGraph, k: &[f64], f: FaceIndex, own: f64) -> (f64, f64) {
    let mut diag = 0.0;
    let mut off = 0.0;
    for inc in g.incidences(f) {
        if inc.neighbor == f {
            let (d, c) = spherical::arc_partials(own, own, inc.theta);
            diag += d + c;
        } else {
            let (d, c) = spherical::arc_partials(own, k[inc.neighbor.0], inc.theta);
            diag += d;
            off -= c;
        }
    }
    (diag, off)
}

pub(crate) fn totals_raw(g: &PatternGraph, k: &[f64]) -> Vec<f64> {
    g.face_indices().map(|f| face_total(g, k, f, k[f.0])).collect()
}

/// Total geodesic curvature of every face boundary, indexed by face.
pub fn total_curvatures(g: &PatternGraph, k: &CurvatureVector) -> Vec<f64> {
    debug_assert_eq!(k.len(), g.face_count());
    totals_raw(g, k.values())
}

/// Checked variant of [`total_curvatures`].
pub fn try_total_curvatures(g: &PatternGraph, k: &CurvatureVector) -> Result<Vec<f64>> {
    check_len(g, k)?;
    Ok(totals_raw(g, k.values()))
}

/// Sparse Jacobian `∂T_i/∂u_j`, one row per face with columns ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    rows: Vec<Vec<(FaceIndex, f64)>>,
}

impl Jacobian {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: FaceIndex) -> &[(FaceIndex, f64)] {
        &self.rows[i.0]
    }

    pub fn get(&self, i: FaceIndex, j: FaceIndex) -> f64 {
        self.rows[i.0]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|p| self.rows[i.0][p].1)
            .unwrap_or(0.0)
    }

    pub fn row_sum(&self, i: FaceIndex) -> f64 {
        self.rows[i.0].iter().map(|&(_, v)| v).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; n];
                for &(c, v) in row {
                    dense[c.0] = v;
                }
                dense
            })
            .collect()
    }
}

pub fn jacobian(g: &PatternGraph, k: &CurvatureVector) -> Result<Jacobian> {
    check_len(g, k)?;
    let kv = k.values();
    let rows = g
        .face_indices()
        .map(|f| {
            let mut row: BTreeMap<FaceIndex, f64> = BTreeMap::new();
            row.insert(f, 0.0);
            for inc in g.incidences(f) {
                let other = kv[inc.neighbor.0];
                let (d, c) = spherical::arc_partials(kv[f.0], other, inc.theta);
                *row.entry(f).or_default() += d;
                *row.entry(inc.neighbor).or_default() += c;
            }
            row.into_iter().collect()
        })
        .collect();
    Ok(Jacobian { rows })
}

/// Cone angle at the center of face `f`: the sum of the central angles of all
/// its boundary arcs.
pub fn face_cone_angle(g: &PatternGraph, k: &CurvatureVector, f: FaceIndex) -> Result<f64> {
    check_len(g, k)?;
    if f.0 >= g.face_count() {
        return Err(Error::UnknownFace(format!("#{}", f.0)));
    }
    Ok(cone_angle_raw(g, k.values(), f))
}

fn cone_angle_raw(g: &PatternGraph, k: &[f64], f: FaceIndex) -> f64 {
    g.incidences(f)
        .iter()
        .map(|inc| spherical::central_angle(k[f.0], k[inc.neighbor.0], inc.theta))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceGeometry {
    pub id: String,
    pub curvature: f64,
    pub radius: f64,
    pub cone_angle: f64,
    pub area: f64,
    pub total_curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeGeometry {
    pub id: String,
    pub faces: [String; 2],
    pub theta: f64,
    /// Central angle of the arc on each side's disk.
    pub central_angles: [f64; 2],
    pub arc_curvatures: [f64; 2],
    pub bigon_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalGeometry {
    /// `Σ_f disk area − Σ_e bigon area`.
    pub surface_area: f64,
    /// `Σ_f α_f − 2 Σ_e θ_e`, the same area from angles alone.
    pub surface_area_from_angles: f64,
    pub surface_area_residual: f64,
    pub bigon_area_total: f64,
    /// `|Σ_e bigon area − (2 Σ θ − Σ T)|`.
    pub bigon_identity_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
    /// `|Area + Σ_v (2π − α_v) + Σ_f (2π − α_f) − 2πχ|`, when vertices are known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_bonnet_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub faces: Vec<FaceGeometry>,
    pub edges: Vec<EdgeGeometry>,
    pub global: GlobalGeometry,
    pub warnings: Vec<String>,
}

impl GeometryReport {
    pub fn min_bigon_area(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.bigon_area)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn gauss_bonnet_report(g: &PatternGraph, k: &CurvatureVector) -> Result<GeometryReport> {
    check_len(g, k)?;
    let kv = k.values();
    let mut warnings = Vec::new();

    let faces: Vec<FaceGeometry> = g
        .face_indices()
        .map(|f| {
            let kf = kv[f.0];
            let cone_angle = cone_angle_raw(g, kv, f);
            FaceGeometry {
                id: g.face_id(f).to_owned(),
                curvature: kf,
                radius: arccot(kf),
                cone_angle,
                area: spherical::disk_area(cone_angle, kf),
                total_curvature: face_total(g, kv, f, kf),
            }
        })
        .collect();

    let edges: Vec<EdgeGeometry> = g
        .edges()
        .iter()
        .map(|e| {
            let [a, b] = e.faces;
            let (ka, kb) = (kv[a.0], kv[b.0]);
            let arc_curvatures = [
                spherical::arc_curvature(ka, kb, e.theta),
                spherical::arc_curvature(kb, ka, e.theta),
            ];
            EdgeGeometry {
                id: e.id.clone(),
                faces: [g.face_id(a).to_owned(), g.face_id(b).to_owned()],
                theta: e.theta,
                central_angles: [
                    spherical::central_angle(ka, kb, e.theta),
                    spherical::central_angle(kb, ka, e.theta),
                ],
                arc_curvatures,
                bigon_area: 2.0 * e.theta - arc_curvatures[0] - arc_curvatures[1],
            }
        })
        .collect();

    for e in &edges {
        if !(e.bigon_area > 0.0) {
            warnings.push(format!("bigon of edge `{}` has non-positive area {}", e.id, e.bigon_area));
        }
    }
    for f in &faces {
        if !(f.radius > 0.0 && f.radius < std::f64::consts::FRAC_PI_2) {
            warnings.push(format!("face `{}` has radius {} outside (0, pi/2)", f.id, f.radius));
        }
    }

    let disk_total: f64 = faces.iter().map(|f| f.area).sum();
    let bigon_area_total: f64 = edges.iter().map(|e| e.bigon_area).sum();
    let cone_total: f64 = faces.iter().map(|f| f.cone_angle).sum();
    let t_total: f64 = faces.iter().map(|f| f.total_curvature).sum();
    let two_theta = 2.0 * g.total_weight();

    let surface_area = disk_total - bigon_area_total;
    let surface_area_from_angles = cone_total - two_theta;

    let gauss_bonnet_residual = g.euler_characteristic().map(|chi| {
        let vertex_defect: f64 = (0..g.vertex_count().unwrap_or(0))
            .map(|v| TAU - g.vertex_cone_angle(crate::VertexIndex(v)))
            .sum();
        let face_defect: f64 = faces.iter().map(|f| TAU - f.cone_angle).sum();
        (surface_area + vertex_defect + face_defect - TAU * chi as f64).abs()
    });
    if gauss_bonnet_residual.is_none() {
        warnings.push("no vertex data: global Gauss-Bonnet residual omitted".into());
    }

    Ok(GeometryReport {
        faces,
        edges,
        global: GlobalGeometry {
            surface_area,
            surface_area_from_angles,
            surface_area_residual: (surface_area - surface_area_from_angles).abs(),
            bigon_area_total,
            bigon_identity_residual: (bigon_area_total - (two_theta - t_total)).abs(),
            euler_characteristic: g.euler_characteristic(),
            gauss_bonnet_residual,
        },
        warnings,
    })
}
