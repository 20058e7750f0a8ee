//! Upper half-plane and upper half-space formulas.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::circle::Circle;
use crate::error::{invalid, Error, Result};

/// A point `z + h·j` of upper half-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpacePoint {
    pub z: Complex64,
    pub height: f64,
}

/// Hyperbolic distance in upper half-space.
pub fn h3_distance(p: HalfSpacePoint, q: HalfSpacePoint) -> f64 {
    let dz = (p.z - q.z).norm_sqr();
    let dh = p.height - q.height;
    let arg = (dz + dh * dh) / (2.0 * p.height * q.height);
    // acosh(1 + x) = ln(1 + x + sqrt(x(x + 2))), stable for small x.
    (arg + (arg * (arg + 2.0)).sqrt()).ln_1p()
}

/// Hyperbolic area of the disk bounded by `circle`, which must lie strictly
/// inside the upper half-plane: `2π(y₀/√(y₀² − r²) − 1)`.
pub fn hyperbolic_area(circle: &Circle<f64>) -> Result<f64> {
    let (center, r) = match (circle.center(), circle.radius()) {
        (Some(c), Some(r)) => (c, r),
        _ => return Err(Error::NotInUpperHalfPlane("a line does not bound a disk in H²".into())),
    };
    if center.im <= r {
        return Err(Error::NotInUpperHalfPlane(format!(
            "center height {} does not exceed radius {r}",
            center.im
        )));
    }
    Ok(area_from_ratio(r / center.im))
}

/// Area of a hyperbolic disk whose Euclidean radius is `ratio` times the
/// height of its Euclidean center.
pub fn area_from_ratio(ratio: f64) -> f64 {
    let s = ratio * ratio;
    let root = (1.0 - s).sqrt();
    // 1/√(1-s) - 1 without cancellation.
    2.0 * PI * s / (root * (1.0 + root))
}

/// `β(t) = √(t(4π + t)) / (2π + t)`: a disk has hyperbolic area `> t`
/// iff its radius exceeds `β(t)` times the height of its center.
pub fn beta(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("beta needs t > 0, got {t}")));
    }
    Ok((t * (4.0 * PI + t)).sqrt() / (2.0 * PI + t))
}

/// Inverse of [`beta`] on `(0, 1)`.
pub fn beta_inverse(b: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(invalid(format!("beta values lie in (0, 1), got {b}")));
    }
    Ok(area_from_ratio(b))
}

/// Busemann function `β_z(p + r·j, z + j) = log((|z − p|² + r²)/r)`.
pub fn busemann(z: Complex64, p: Complex64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid(format!("busemann needs r > 0, got {r}")));
    }
    Ok((((z - p).norm_sqr() + r * r) / r).ln())
}

/// Hyperbolic center of a disk contained in the upper half-plane.
pub fn hyperbolic_center(circle: &Circle<f64>) -> Result<Complex64> {
    let (center, r) = match (circle.center(), circle.radius()) {
        (Some(c), Some(r)) if c.im > r => (c, r),
        _ => return Err(Error::NotInUpperHalfPlane("disk not contained in H²".into())),
    };
    Ok(Complex64::new(center.re, ((center.im - r) * (center.im + r)).sqrt()))
}
