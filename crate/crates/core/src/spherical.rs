//! Closed-form spherical trigonometry of conical disks and their bigons.
//!
//! Curvatures and radii are related by `k = cot r`, radii live in `(0, π/2)`.
//! Two disks of curvatures `k_i`, `k_j` meeting at angle `θ` bound a lens (the
//! bigon) whose sides are arcs of the two boundary circles. Everything here is
//! a pure function of `(k_i, k_j, θ)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::{Error, Result};

/// Smallest curvature accepted at API boundaries.
pub const CURVATURE_MIN: f64 = 1e-300;
/// Largest curvature accepted at API boundaries.
pub const CURVATURE_MAX: f64 = 1e300;

/// Inverse cotangent with range `(0, π)`, continuous and decreasing on ℝ.
#[inline]
pub fn arccot(x: f64) -> f64 {
    1f64.atan2(x)
}

pub(crate) fn check_curvature(quantity: &'static str, k: f64) -> Result<f64> {
    if k.is_finite() && (CURVATURE_MIN..=CURVATURE_MAX).contains(&k) {
        Ok(k)
    } else {
        Err(Error::Range {
            quantity,
            value: k,
            bound: "finite and within [1e-300, 1e300]",
        })
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<f64> {
    if theta > 0.0 && theta <= FRAC_PI_2 {
        Ok(theta)
    } else {
        Err(Error::Range {
            quantity: "theta",
            value: theta,
            bound: "in (0, pi/2]",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conversion {
    ToCurvature,
    ToRadius,
}

/// Converts a radius to a curvature or back.
pub fn curvature_radius_convert(x: f64, direction: Conversion) -> Result<f64> {
    match direction {
        Conversion::ToCurvature => curvature_from_radius(x),
        Conversion::ToRadius => radius_from_curvature(x),
    }
}

pub fn curvature_from_radius(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(Error::Range {
            quantity: "radius",
            value: r,
            bound: "in (0, pi/2)",
        });
    }
    check_curvature("curvature", 1.0 / r.tan())
}

pub fn radius_from_curvature(k: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Range {
            quantity: "curvature",
            value: k,
            bound: "finite and > 0",
        });
    }
    Ok(arccot(k))
}

/// A conical spherical disk of cone angle `α` and radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskGeometry {
    cone_angle: f64,
    radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskQuantities {
    pub circumference: f64,
    pub area: f64,
    pub total_curvature: f64,
    /// Discrete Gaussian curvature `2π − α` at the cone point.
    pub gaussian_defect: f64,
}

impl DiskGeometry {
    pub fn new(cone_angle: f64, radius: f64) -> Result<Self> {
        if !(cone_angle > 0.0 && cone_angle.is_finite()) {
            return Err(Error::Range {
                quantity: "cone_angle",
                value: cone_angle,
                bound: "finite and > 0",
            });
        }
        if !(radius > 0.0 && radius < FRAC_PI_2) {
            return Err(Error::Range {
                quantity: "radius",
                value: radius,
                bound: "in (0, pi/2)",
            });
        }
        Ok(Self { cone_angle, radius })
    }

    pub fn cone_angle(&self) -> f64 {
        self.cone_angle
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.radius.tan()
    }

    /// Boundary length `α sin r`, area `2α sin²(r/2)`, total geodesic
    /// curvature `α cos r` and the cone defect.
    pub fn quantities(&self) -> DiskQuantities {
        let (s, c) = self.radius.sin_cos();
        let half = (0.5 * self.radius).sin();
        DiskQuantities {
            circumference: self.cone_angle * s,
            area: 2.0 * self.cone_angle * half * half,
            total_curvature: self.cone_angle * c,
            gaussian_defect: TAU - self.cone_angle,
        }
    }
}

/// Selects one of the two disks of a bigon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    I,
    J,
}

/// Local data of one bigon: the two curvatures and the intersection angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigonConfig {
    k_i: f64,
    k_j: f64,
    theta: f64,
}

/// Partial derivatives of the two arc curvatures in logarithmic coordinates
/// `u = ln k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPartials {
    pub dti_dui: f64,
    pub dti_duj: f64,
    pub dtj_duj: f64,
    pub dtj_dui: f64,
}

impl BigonConfig {
    pub fn new(k_i: f64, k_j: f64, theta: f64) -> Result<Self> {
        Ok(Self {
            k_i: check_curvature("k_i", k_i)?,
            k_j: check_curvature("k_j", k_j)?,
            theta: check_theta(theta)?,
        })
    }

    pub fn k_i(&self) -> f64 {
        self.k_i
    }

    pub fn k_j(&self) -> f64 {
        self.k_j
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The same bigon seen from the other disk.
    pub fn swapped(&self) -> Self {
        Self {
            k_i: self.k_j,
            k_j: self.k_i,
            theta: self.theta,
        }
    }

    fn oriented(&self, side: Side) -> (f64, f64) {
        match side {
            Side::I => (self.k_i, self.k_j),
            Side::J => (self.k_j, self.k_i),
        }
    }

    /// Angle at the chosen disk's center subtended by its arc of the bigon.
    pub fn central_angle(&self, side: Side) -> f64 {
        let (k, other) = self.oriented(side);
        central_angle(k, other, self.theta)
    }

    /// Total geodesic curvature of the chosen disk's arc, in `(0, 2θ)`.
    pub fn arc_curvature(&self, side: Side) -> f64 {
        let (k, other) = self.oriented(side);
        arc_curvature(k, other, self.theta)
    }

    /// Lens area `2θ − T_i − T_j`.
    pub fn area(&self) -> f64 {
        2.0 * self.theta - self.arc_curvature(Side::I) - self.arc_curvature(Side::J)
    }

    pub fn partials(&self) -> ArcPartials {
        let (dti_dui, dti_duj) = arc_partials(self.k_i, self.k_j, self.theta);
        let (dtj_duj, dtj_dui) = arc_partials(self.k_j, self.k_i, self.theta);
        ArcPartials {
            dti_dui,
            dti_duj,
            dtj_duj,
            dtj_dui,
        }
    }
}

/// `cos r`, `sin r` for `k = cot r`, without squaring `k`.
#[inline]
fn cos_sin_radius(k: f64) -> (f64, f64) {
    let h = k.hypot(1.0);
    (k / h, 1.0 / h)
}

/// Argument of the cotangent four-part formula,
/// `cot(α/2) = (cot r_j sin r_i + cos r_i cos θ) / sin θ`.
#[inline]
fn half_angle_cot(k: f64, other: f64, theta: f64) -> f64 {
    let (cos_r, sin_r) = cos_sin_radius(k);
    let (s, c) = theta.sin_cos();
    (other * sin_r + cos_r * c) / s
}

#[inline]
pub(crate) fn central_angle(k: f64, other: f64, theta: f64) -> f64 {
    2.0 * arccot(half_angle_cot(k, other, theta))
}

#[inline]
pub(crate) fn arc_curvature(k: f64, other: f64, theta: f64) -> f64 {
    let (cos_r, _) = cos_sin_radius(k);
    cos_r * central_angle(k, other, theta)
}

/// `arccot x − x / (1 + x²)` for `x > 0`, which is positive and decays like
/// `2 / (3x³)`. The series branch avoids the cancellation for large `x`.
fn arccot_excess(x: f64) -> f64 {
    if x <= 4.0 {
        return arccot(x) - x / (1.0 + x * x);
    }
    let y = 1.0 / x;
    let y2 = y * y;
    // Σ (−1)^(n+1) 2n y^(2n+1) / (2n+1)
    let mut power = y * y2;
    let mut sum = 0.0;
    let mut sign = 1.0;
    for n in 1..40 {
        let n = f64::from(n);
        let term = sign * 2.0 * n * power / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
        power *= y2;
        sign = -sign;
    }
    sum
}

/// `(∂T/∂u_own, ∂T/∂u_other)` for the arc of the disk with curvature `k`.
///
/// The cross term is `−2 k k' sin θ / (k² + k'² + 2 k k' cos θ + sin² θ)`.
/// Their sum is `2 cos r sin² r (arccot x − x / (1 + x²))` where `x` is the
/// four-part cotangent argument, so the own term is assembled from two
/// positive pieces.
pub(crate) fn arc_partials(k: f64, other: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let m = k.max(other).max(1.0);
    let (kn, on, sn) = (k / m, other / m, s / m);
    let denom = kn * kn + on * on + 2.0 * kn * on * c + sn * sn;
    let cross = -2.0 * kn * on * s / denom;

    let (cos_r, sin_r) = cos_sin_radius(k);
    let x = (other * sin_r + cos_r * c) / s;
    let dominance = 2.0 * cos_r * sin_r * sin_r * arccot_excess(x);
    (dominance - cross, cross)
}

/// Full-disk area `2α sin²(r/2) = α (1 − cos r)`; used by the assembly code.
#[inline]
pub(crate) fn disk_area(cone_angle: f64, k: f64) -> f64 {
    let (cos_r, sin_r) = cos_sin_radius(k);
    // 1 − cos r = sin² r / (1 + cos r)
    cone_angle * sin_r * sin_r / (1.0 + cos_r)
}
