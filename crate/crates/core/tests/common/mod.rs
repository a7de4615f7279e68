//! Independent oracles and random instance builders shared by the
//! integration tests. Nothing here calls the closed forms under test.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use circle_pattern::graph::{generate_torus_grid, EdgeDoc, FaceDoc, PatternDoc};
use circle_pattern::{BigonConfig, PatternGraph, Side};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

/// θ drawn from `(0, π/2]` with a small positive floor.
pub fn random_theta(rng: &mut impl Rng) -> f64 {
    rng.gen_range(1e-3..=FRAC_PI_2)
}

/// Torus grid with an independent random weight per edge.
pub fn random_torus(rng: &mut impl Rng, n: usize, theta_lo: f64) -> PatternGraph {
    let mut doc = generate_torus_grid(n, 1.0).unwrap().to_doc();
    for e in &mut doc.edges {
        e.theta = rng.gen_range(theta_lo..=FRAC_PI_2);
    }
    PatternGraph::from_doc(&doc).unwrap()
}

/// Face–edge incidence structure without vertex data: a chain through all
/// faces plus random extra edges, self-adjacent ones included.
pub fn random_incidence(rng: &mut impl Rng, faces: usize) -> PatternGraph {
    let mut pairs: Vec<(usize, usize)> = (1..faces).map(|i| (i - 1, i)).collect();
    if faces == 1 {
        pairs.push((0, 0));
    }
    for _ in 0..rng.gen_range(0..=faces + 2) {
        pairs.push((rng.gen_range(0..faces), rng.gen_range(0..faces)));
    }
    let edges: Vec<EdgeDoc> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| EdgeDoc {
            id: format!("e{i}"),
            v: None,
            theta: random_theta(rng),
            faces: [format!("f{a}"), format!("f{b}")],
        })
        .collect();
    let faces = (0..faces)
        .map(|f| FaceDoc {
            id: format!("f{f}"),
            edges: pairs
                .iter()
                .enumerate()
                .flat_map(|(i, &(a, b))| {
                    let id = format!("e{i}");
                    (a == f).then(|| id.clone()).into_iter().chain((b == f).then_some(id))
                })
                .collect(),
        })
        .collect();
    let doc = PatternDoc {
        vertices: None,
        edges,
        faces,
        targets: None,
    };
    PatternGraph::from_doc(&doc).unwrap()
}

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn angle_between(a: V3, b: V3) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    dot(cross, cross).sqrt().atan2(dot(a, b))
}

/// Two circles on the unit sphere in 3-space: circle `i` of radius `r_i`
/// around the north pole, circle `j` of radius `r_j` around a center at
/// polar angle `d` in the xz-plane.
struct SpherePair {
    r_i: f64,
    r_j: f64,
    d: f64,
}

impl SpherePair {
    fn centers(&self) -> (V3, V3) {
        ([0.0, 0.0, 1.0], [self.d.sin(), 0.0, self.d.cos()])
    }

    /// Upper intersection point (y > 0), from the two plane equations
    /// `x·c = cos r` and `|x| = 1`.
    fn intersection(&self) -> V3 {
        let z = self.r_i.cos();
        let x = (self.r_j.cos() - z * self.d.cos()) / self.d.sin();
        let y = (1.0 - x * x - z * z).max(0.0).sqrt();
        [x, y, z]
    }

    /// Interior angle of the lens at an intersection point: π minus the
    /// angle between the tangent directions pointing to the two centers.
    fn lens_angle(&self) -> f64 {
        let p = self.intersection();
        let (ci, cj) = self.centers();
        let ni = sub(ci, scale(p, dot(ci, p)));
        let nj = sub(cj, scale(p, dot(cj, p)));
        PI - angle_between(ni, nj)
    }
}

/// Places two circles of curvatures `k_i`, `k_j` so that they cross at lens
/// angle `theta`, by bisection on the center distance measured in 3-space.
fn place(k_i: f64, k_j: f64, theta: f64) -> SpherePair {
    let r_i = (1.0 / k_i).atan();
    let r_j = (1.0 / k_j).atan();
    let (mut lo, mut hi) = ((r_i - r_j).abs(), r_i + r_j);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let pair = SpherePair { r_i, r_j, d: mid };
        // larger separation gives a thinner lens
        if pair.lens_angle() > theta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    SpherePair {
        r_i,
        r_j,
        d: 0.5 * (lo + hi),
    }
}

/// Central angle on disk `i` between the two crossing points, from 3-space
/// coordinates.
pub fn central_angle_3d(k_i: f64, k_j: f64, theta: f64) -> f64 {
    let p = place(k_i, k_j, theta).intersection();
    2.0 * p[1].atan2(p[0])
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Area of the lens between two crossing disks, integrated over circles
/// around the center of disk `i`.
pub fn lens_area_integrated(k_i: f64, k_j: f64, theta: f64) -> f64 {
    let pair = place(k_i, k_j, theta);
    let (r_i, r_j, d) = (pair.r_i, pair.r_j, pair.d);
    let integrand = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        let q = (r_j.cos() - rho.cos() * d.cos()) / (rho.sin() * d.sin());
        2.0 * q.clamp(-1.0, 1.0).acos() * rho.sin()
    };
    let mut cuts = vec![0.0, r_i];
    for b in [(d - r_j).abs(), d + r_j] {
        if b > 0.0 && b < r_i {
            cuts.push(b);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| adaptive_simpson(&integrand, w[0], w[1], 1e-13))
        .sum()
}

/// Central difference in `u = ln k` with one Richardson extrapolation step.
pub fn fd_log_derivative(f: &dyn Fn(f64) -> f64, k: f64, h: f64) -> f64 {
    let d = |h: f64| (f(k * h.exp()) - f(k * (-h).exp())) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// `(∂T_i/∂u_i, ∂T_i/∂u_j)` by finite differences of the arc total.
pub fn fd_arc_partials(k_i: f64, k_j: f64, theta: f64) -> (f64, f64) {
    let h = 1e-3;
    let own = fd_log_derivative(
        &|x| BigonConfig::new(x, k_j, theta).unwrap().arc_curvature(Side::I),
        k_i,
        h,
    );
    let cross = fd_log_derivative(
        &|x| BigonConfig::new(k_i, x, theta).unwrap().arc_curvature(Side::I),
        k_j,
        h,
    );
    (own, cross)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
