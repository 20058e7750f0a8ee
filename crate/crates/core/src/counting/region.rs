//! Bounded test sets in the plane and the circle-meets-region predicate.
//!
//! Convex primitives and annuli are tested in closed form from the range of
//! distances between the circle's center and the region. Every other region
//! uses the crossing method: membership along a curve can only change where
//! the curve crosses the region boundary, so it suffices to test the crossing
//! points with each supporting boundary curve and one point on every arc
//! between consecutive crossings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{Circle, CircleKind};

/// Slack applied to closed-set membership and tangency tests.
pub const REGION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Bounds {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn everything() -> Self {
        Self::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite())
    }

    pub fn is_empty(&self) -> bool {
        self.x0 > self.x1 || self.y0 > self.y1
    }

    pub fn intersect(&self, other: &Bounds) -> Bounds {
        Bounds::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        )
    }

    pub fn union(&self, other: &Bounds) -> Bounds {
        Bounds::new(
            self.x0.min(other.x0),
            self.y0.min(other.y0),
            self.x1.max(other.x1),
            self.y1.max(other.y1),
        )
    }

    pub fn expand(&self, by: f64) -> Bounds {
        Bounds::new(self.x0 - by, self.y0 - by, self.x1 + by, self.y1 + by)
    }

    pub fn contains_bounds(&self, other: &Bounds) -> bool {
        other.is_empty()
            || (self.x0 <= other.x0 && self.y0 <= other.y0 && self.x1 >= other.x1 && self.y1 >= other.y1)
    }

    pub fn overlaps(&self, other: &Bounds) -> bool {
        !self.intersect(other).is_empty()
    }
}

/// A closed subset of the plane built from primitives and combinators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disk { cx: f64, cy: f64, r: f64 },
    Annulus { cx: f64, cy: f64, r0: f64, r1: f64 },
    /// `{z : Re(n̄ z) ≤ d}` with unit `n`.
    HalfPlane { nx: f64, ny: f64, d: f64 },
    /// `{z : |z − c| ≥ r}`; unbounded.
    OutsideDisk { cx: f64, cy: f64, r: f64 },
    /// The ideal triangle `{|Re z| ≤ 1, |z| ≥ 1, Im z ≥ 0}`; unbounded.
    TriangleT,
    /// `{z ∈ T : t^η ≤ Im z ≤ t^−η}`.
    TruncatedT { eta: f64, t: f64 },
    /// Points within `eps` of the inner region.
    Dilate { inner: Box<Region>, eps: f64 },
    Intersect { parts: Vec<Region> },
    Union { parts: Vec<Region> },
    /// `bound ∖ int(hole)`: the closure of the part of `bound` outside `hole`.
    Minus { bound: Box<Region>, hole: Box<Region> },
}

/// A full circle or line supporting part of a region boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Curve {
    Circle { c: Complex64, r: f64 },
    Line { n: Complex64, d: f64 },
}

impl Region {
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Region> {
        if !(x0 <= x1 && y0 <= y1) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad rectangle {x0},{y0},{x1},{y1}")));
        }
        Ok(Region::Rect { x0, y0, x1, y1 })
    }

    pub fn disk(cx: f64, cy: f64, r: f64) -> Result<Region> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad disk radius {r}")));
        }
        Ok(Region::Disk { cx, cy, r })
    }

    pub fn annulus(cx: f64, cy: f64, r0: f64, r1: f64) -> Result<Region> {
        if !(0.0 <= r0 && r0 <= r1 && r1.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad annulus radii {r0},{r1}")));
        }
        Ok(Region::Annulus { cx, cy, r0, r1 })
    }

    pub fn half_plane(n: Complex64, d: f64) -> Result<Region> {
        let norm = n.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("half-plane normal must be nonzero".into()));
        }
        Ok(Region::HalfPlane { nx: n.re / norm, ny: n.im / norm, d: d / norm })
    }

    pub fn outside_disk(cx: f64, cy: f64, r: f64) -> Result<Region> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad radius {r}")));
        }
        Ok(Region::OutsideDisk { cx, cy, r })
    }

    pub fn truncated_triangle(eta: f64, t: f64) -> Result<Region> {
        if !(eta > 0.0 && t > 0.0 && t < 1.0) {
            return Err(Error::InvalidArgument(format!("truncT needs eta > 0 and 0 < t < 1, got {eta},{t}")));
        }
        Ok(Region::TruncatedT { eta, t })
    }

    /// Euclidean `eps`-neighborhood. Supported for regions with an exact
    /// distance function; closed forms are used where they exist.
    pub fn dilate(&self, eps: f64) -> Result<Region> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad dilation radius {eps}")));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        Ok(match self {
            Region::Disk { cx, cy, r } => Region::Disk { cx: *cx, cy: *cy, r: r + eps },
            Region::Annulus { cx, cy, r0, r1 } if *r0 <= eps => Region::Disk { cx: *cx, cy: *cy, r: r1 + eps },
            Region::Annulus { cx, cy, r0, r1 } => Region::Annulus { cx: *cx, cy: *cy, r0: r0 - eps, r1: r1 + eps },
            Region::HalfPlane { nx, ny, d } => Region::HalfPlane { nx: *nx, ny: *ny, d: d + eps },
            Region::OutsideDisk { cx, cy, r } if *r > eps => Region::OutsideDisk { cx: *cx, cy: *cy, r: r - eps },
            Region::Dilate { inner, eps: e } => Region::Dilate { inner: inner.clone(), eps: e + eps },
            Region::Rect { .. } => Region::Dilate { inner: Box::new(self.clone()), eps },
            Region::Union { parts } => Region::Union {
                parts: parts.iter().map(|p| p.dilate(eps)).collect::<Result<_>>()?,
            },
            other => {
                return Err(Error::Unsupported(format!("dilation of {other}")));
            }
        })
    }

    /// Points at distance at least `eps` from the complement.
    pub fn erode(&self, eps: f64) -> Result<Region> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad erosion radius {eps}")));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        let empty = || Region::Union { parts: Vec::new() };
        Ok(match self {
            Region::Rect { x0, y0, x1, y1 } => {
                if x1 - x0 < 2.0 * eps || y1 - y0 < 2.0 * eps {
                    empty()
                } else {
                    Region::Rect { x0: x0 + eps, y0: y0 + eps, x1: x1 - eps, y1: y1 - eps }
                }
            }
            Region::Disk { cx, cy, r } => {
                if *r < eps {
                    empty()
                } else {
                    Region::Disk { cx: *cx, cy: *cy, r: r - eps }
                }
            }
            Region::Annulus { cx, cy, r0, r1 } => {
                if r1 - r0 < 2.0 * eps {
                    empty()
                } else if *r0 == 0.0 {
                    Region::Disk { cx: *cx, cy: *cy, r: r1 - eps }
                } else {
                    Region::Annulus { cx: *cx, cy: *cy, r0: r0 + eps, r1: r1 - eps }
                }
            }
            Region::HalfPlane { nx, ny, d } => Region::HalfPlane { nx: *nx, ny: *ny, d: d - eps },
            Region::OutsideDisk { cx, cy, r } => Region::OutsideDisk { cx: *cx, cy: *cy, r: r + eps },
            Region::Dilate { inner, eps: e } if matches!(**inner, Region::Rect { .. } | Region::Disk { .. }) => {
                if *e >= eps {
                    inner.dilate(e - eps)?
                } else {
                    inner.erode(eps - e)?
                }
            }
            other => {
                return Err(Error::Unsupported(format!("erosion of {other}")));
            }
        })
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Region {
        let sh = |r: &Region| Box::new(r.translate(dx, dy));
        match self {
            Region::Rect { x0, y0, x1, y1 } => Region::Rect { x0: x0 + dx, y0: y0 + dy, x1: x1 + dx, y1: y1 + dy },
            Region::Disk { cx, cy, r } => Region::Disk { cx: cx + dx, cy: cy + dy, r: *r },
            Region::Annulus { cx, cy, r0, r1 } => Region::Annulus { cx: cx + dx, cy: cy + dy, r0: *r0, r1: *r1 },
            Region::HalfPlane { nx, ny, d } => Region::HalfPlane { nx: *nx, ny: *ny, d: d + nx * dx + ny * dy },
            Region::OutsideDisk { cx, cy, r } => Region::OutsideDisk { cx: cx + dx, cy: cy + dy, r: *r },
            Region::Dilate { inner, eps } => Region::Dilate { inner: sh(inner), eps: *eps },
            Region::Intersect { parts } => Region::Intersect { parts: parts.iter().map(|p| p.translate(dx, dy)).collect() },
            Region::Union { parts } => Region::Union { parts: parts.iter().map(|p| p.translate(dx, dy)).collect() },
            Region::Minus { bound, hole } => Region::Minus { bound: sh(bound), hole: sh(hole) },
            // Translates of the triangle domains leave the closed-form family.
            Region::TriangleT | Region::TruncatedT { .. } => Region::Intersect {
                parts: self.triangle_parts().iter().map(|p| p.translate(dx, dy)).collect(),
            },
        }
    }

    fn triangle_parts(&self) -> Vec<Region> {
        let hp = |nx: f64, ny: f64, d: f64| Region::HalfPlane { nx, ny, d };
        let mut v = vec![
            hp(1.0, 0.0, 1.0),
            hp(-1.0, 0.0, 1.0),
            hp(0.0, -1.0, 0.0),
            Region::OutsideDisk { cx: 0.0, cy: 0.0, r: 1.0 },
        ];
        if let Region::TruncatedT { eta, t } = self {
            v.push(hp(0.0, -1.0, -t.powf(*eta)));
            v.push(hp(0.0, 1.0, t.powf(-*eta)));
        }
        v
    }

    /// Axis-aligned bounding box; `None` for unbounded regions.
    pub fn bounds(&self) -> Option<Bounds> {
        match self {
            Region::Rect { x0, y0, x1, y1 } => Some(Bounds::new(*x0, *y0, *x1, *y1)),
            Region::Disk { cx, cy, r } => Some(Bounds::new(cx - r, cy - r, cx + r, cy + r)),
            Region::Annulus { cx, cy, r1, .. } => Some(Bounds::new(cx - r1, cy - r1, cx + r1, cy + r1)),
            Region::HalfPlane { .. } | Region::OutsideDisk { .. } | Region::TriangleT => None,
            Region::TruncatedT { eta, t } => Some(Bounds::new(-1.0, t.powf(*eta), 1.0, t.powf(-*eta))),
            Region::Dilate { inner, eps } => inner.bounds().map(|b| b.expand(*eps)),
            Region::Intersect { parts } => {
                let mut acc: Option<Bounds> = None;
                for b in parts.iter().filter_map(Region::bounds) {
                    acc = Some(acc.map_or(b, |a| a.intersect(&b)));
                }
                acc
            }
            Region::Union { parts } => {
                let mut acc = Some(Bounds::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY));
                for p in parts {
                    acc = match (acc, p.bounds()) {
                        (Some(a), Some(b)) => Some(a.union(&b)),
                        _ => None,
                    };
                }
                acc
            }
            Region::Minus { bound, .. } => bound.bounds(),
        }
    }

    /// Bounding box intersected with a clip box, for unbounded regions too.
    pub fn clipped_bounds(&self, clip: &Bounds) -> Bounds {
        let own = match self {
            Region::TriangleT => Bounds::new(-1.0, 0.0, 1.0, f64::INFINITY),
            Region::HalfPlane { nx, ny, d } => {
                let mut b = Bounds::everything();
                if *ny == 0.0 {
                    if *nx > 0.0 {
                        b.x1 = d / nx;
                    } else {
                        b.x0 = d / nx;
                    }
                } else if *nx == 0.0 {
                    if *ny > 0.0 {
                        b.y1 = d / ny;
                    } else {
                        b.y0 = d / ny;
                    }
                }
                b
            }
            Region::Intersect { parts } => {
                let mut b = *clip;
                for p in parts {
                    b = b.intersect(&p.clipped_bounds(clip));
                }
                b
            }
            Region::Union { parts } => parts
                .iter()
                .map(|p| p.clipped_bounds(clip))
                .fold(Bounds::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |a, b| a.union(&b)),
            Region::Minus { bound, .. } => bound.clipped_bounds(clip),
            _ => self.bounds().unwrap_or_else(Bounds::everything),
        };
        own.intersect(clip)
    }

    pub fn is_bounded(&self) -> bool {
        self.bounds().is_some()
    }

    /// True iff the region has no points (only recognized structurally).
    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Union { parts } if parts.iter().all(Region::is_empty))
    }

    /// Closed-set membership with [`REGION_TOLERANCE`] slack.
    pub fn contains(&self, p: Complex64) -> bool {
        self.contains_tol(p, REGION_TOLERANCE * (1.0 + p.norm()))
    }

    fn contains_tol(&self, p: Complex64, tol: f64) -> bool {
        match self {
            Region::Rect { x0, y0, x1, y1 } => {
                p.re >= x0 - tol && p.re <= x1 + tol && p.im >= y0 - tol && p.im <= y1 + tol
            }
            Region::Disk { cx, cy, r } => (p - Complex64::new(*cx, *cy)).norm() <= r + tol,
            Region::Annulus { cx, cy, r0, r1 } => {
                let d = (p - Complex64::new(*cx, *cy)).norm();
                d >= r0 - tol && d <= r1 + tol
            }
            Region::HalfPlane { nx, ny, d } => nx * p.re + ny * p.im <= d + tol,
            Region::OutsideDisk { cx, cy, r } => (p - Complex64::new(*cx, *cy)).norm() >= r - tol,
            Region::TriangleT | Region::TruncatedT { .. } => {
                self.triangle_parts().iter().all(|q| q.contains_tol(p, tol))
            }
            Region::Dilate { inner, eps } => match inner.signed_distance(p) {
                Some(sd) => sd <= eps + tol,
                None => false,
            },
            Region::Intersect { parts } => parts.iter().all(|q| q.contains_tol(p, tol)),
            Region::Union { parts } => parts.iter().any(|q| q.contains_tol(p, tol)),
            Region::Minus { bound, hole } => bound.contains_tol(p, tol) && !hole.interior_contains(p, tol),
        }
    }

    /// Open-interior membership (with the boundary band of width `tol` excluded).
    fn interior_contains(&self, p: Complex64, tol: f64) -> bool {
        match self.signed_distance(p) {
            Some(sd) => sd < -tol,
            None => self.contains_tol(p, -tol),
        }
    }

    /// Signed Euclidean distance to the boundary (negative inside) where it
    /// is available in closed form.
    pub fn signed_distance(&self, p: Complex64) -> Option<f64> {
        Some(match self {
            Region::Rect { x0, y0, x1, y1 } => {
                let dx = (x0 - p.re).max(p.re - x1);
                let dy = (y0 - p.im).max(p.im - y1);
                if dx <= 0.0 && dy <= 0.0 {
                    dx.max(dy)
                } else {
                    dx.max(0.0).hypot(dy.max(0.0))
                }
            }
            Region::Disk { cx, cy, r } => (p - Complex64::new(*cx, *cy)).norm() - r,
            Region::Annulus { cx, cy, r0, r1 } => {
                let d = (p - Complex64::new(*cx, *cy)).norm();
                (r0 - d).max(d - r1)
            }
            Region::HalfPlane { nx, ny, d } => nx * p.re + ny * p.im - d,
            Region::OutsideDisk { cx, cy, r } => r - (p - Complex64::new(*cx, *cy)).norm(),
            Region::Dilate { inner, eps } => inner.signed_distance(p)? - eps,
            Region::Union { parts } => {
                let mut best = f64::INFINITY;
                for q in parts {
                    best = best.min(q.signed_distance(p)?);
                }
                best
            }
            _ => return None,
        })
    }

    /// `[min, max]` of `|p − z|` over `p` in the region, for connected
    /// regions where it has a closed form.
    pub fn distance_range(&self, z: Complex64) -> Option<(f64, f64)> {
        match self {
            Region::Rect { x0, y0, x1, y1 } => {
                let min = self.signed_distance(z)?.max(0.0);
                let fx = (z.re - x0).abs().max((z.re - x1).abs());
                let fy = (z.im - y0).abs().max((z.im - y1).abs());
                Some((min, fx.hypot(fy)))
            }
            Region::Disk { cx, cy, r } => {
                let d = (z - Complex64::new(*cx, *cy)).norm();
                Some(((d - r).max(0.0), d + r))
            }
            Region::Annulus { cx, cy, r0, r1 } => {
                let d = (z - Complex64::new(*cx, *cy)).norm();
                let min = if d < *r0 { r0 - d } else { (d - r1).max(0.0) };
                Some((min, d + r1))
            }
            Region::Dilate { inner, eps } if inner.is_convex() => {
                let (lo, hi) = inner.distance_range(z)?;
                Some(((lo - eps).max(0.0), hi + eps))
            }
            _ => None,
        }
    }

    fn is_convex(&self) -> bool {
        match self {
            Region::Rect { .. } | Region::Disk { .. } | Region::HalfPlane { .. } => true,
            Region::Dilate { inner, .. } => inner.is_convex(),
            _ => false,
        }
    }

    /// Convex primitives: min and max of `Re(n̄ p)` over the region.
    fn support_range(&self, n: Complex64) -> Option<(f64, f64)> {
        match self {
            Region::Rect { x0, y0, x1, y1 } => {
                let vals = [
                    n.re * x0 + n.im * y0,
                    n.re * x0 + n.im * y1,
                    n.re * x1 + n.im * y0,
                    n.re * x1 + n.im * y1,
                ];
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
            Region::Disk { cx, cy, r } => {
                let c = n.re * cx + n.im * cy;
                Some((c - r, c + r))
            }
            Region::HalfPlane { nx, ny, d } => {
                let m = Complex64::new(*nx, *ny);
                let cross = (m.conj() * n).im;
                let dot = (m.conj() * n).re;
                if cross.abs() > 1e-14 {
                    Some((f64::NEG_INFINITY, f64::INFINITY))
                } else if dot > 0.0 {
                    Some((f64::NEG_INFINITY, d * dot))
                } else {
                    Some((d * dot, f64::INFINITY))
                }
            }
            Region::Dilate { inner, eps } => {
                let (lo, hi) = inner.support_range(n)?;
                Some((lo - eps, hi + eps))
            }
            _ => None,
        }
    }

    fn vertices(&self) -> Vec<Complex64> {
        match self {
            Region::Rect { x0, y0, x1, y1 } => vec![
                Complex64::new(*x0, *y0),
                Complex64::new(*x0, *y1),
                Complex64::new(*x1, *y0),
                Complex64::new(*x1, *y1),
            ],
            Region::Dilate { inner, .. } => inner.vertices(),
            Region::Union { parts } | Region::Intersect { parts } => parts.iter().flat_map(Region::vertices).collect(),
            Region::Minus { bound, hole } => {
                let mut v = bound.vertices();
                v.extend(hole.vertices());
                v
            }
            _ => Vec::new(),
        }
    }

    /// A superset of the curves carrying the region boundary.
    fn boundary_curves(&self, out: &mut Vec<Curve>) {
        match self {
            Region::Rect { x0, y0, x1, y1 } => {
                out.push(Curve::Line { n: Complex64::new(1.0, 0.0), d: *x0 });
                out.push(Curve::Line { n: Complex64::new(1.0, 0.0), d: *x1 });
                out.push(Curve::Line { n: Complex64::new(0.0, 1.0), d: *y0 });
                out.push(Curve::Line { n: Complex64::new(0.0, 1.0), d: *y1 });
            }
            Region::Disk { cx, cy, r } | Region::OutsideDisk { cx, cy, r } => {
                out.push(Curve::Circle { c: Complex64::new(*cx, *cy), r: *r })
            }
            Region::Annulus { cx, cy, r0, r1 } => {
                out.push(Curve::Circle { c: Complex64::new(*cx, *cy), r: *r0 });
                out.push(Curve::Circle { c: Complex64::new(*cx, *cy), r: *r1 });
            }
            Region::HalfPlane { nx, ny, d } => out.push(Curve::Line { n: Complex64::new(*nx, *ny), d: *d }),
            Region::TriangleT | Region::TruncatedT { .. } => {
                for p in self.triangle_parts() {
                    p.boundary_curves(out);
                }
            }
            Region::Dilate { inner, eps } => {
                let mut base = Vec::new();
                inner.boundary_curves(&mut base);
                for curve in base {
                    match curve {
                        Curve::Line { n, d } => {
                            out.push(Curve::Line { n, d: d + eps });
                            out.push(Curve::Line { n, d: d - eps });
                        }
                        Curve::Circle { c, r } => {
                            out.push(Curve::Circle { c, r: r + eps });
                            if r > *eps {
                                out.push(Curve::Circle { c, r: r - eps });
                            }
                        }
                    }
                }
                for v in inner.vertices() {
                    out.push(Curve::Circle { c: v, r: *eps });
                }
            }
            Region::Intersect { parts } | Region::Union { parts } => {
                for p in parts {
                    p.boundary_curves(out);
                }
            }
            Region::Minus { bound, hole } => {
                bound.boundary_curves(out);
                hole.boundary_curves(out);
            }
        }
    }
}

/// True iff the curve `circle` (a circle or a line) meets the closed region.
pub fn circle_meets_region(circle: &Circle<f64>, region: &Region) -> bool {
    if region.is_empty() {
        return false;
    }
    match circle.kind() {
        CircleKind::Circle => {
            let c = circle.center().expect("circle");
            let r = circle.radius().expect("circle");
            meets_circle(c, r, region)
        }
        CircleKind::Line => {
            let n = circle.normal().expect("line");
            let d = circle.offset().expect("line");
            meets_line(n, d, region)
        }
    }
}

fn meets_circle(c: Complex64, r: f64, region: &Region) -> bool {
    let tol = REGION_TOLERANCE * (1.0 + c.norm() + r);
    match region {
        Region::Union { parts } => parts.iter().any(|p| meets_circle(c, r, p)),
        Region::Annulus { .. } | Region::Rect { .. } | Region::Disk { .. } => {
            let (lo, hi) = region.distance_range(c).expect("closed form");
            lo <= r + tol && r <= hi + tol
        }
        Region::Dilate { inner, .. } if inner.is_convex() => {
            let (lo, hi) = region.distance_range(c).expect("closed form");
            lo <= r + tol && r <= hi + tol
        }
        Region::HalfPlane { nx, ny, d } => nx * c.re + ny * c.im - r <= d + tol,
        Region::OutsideDisk { cx, cy, r: big } => (c - Complex64::new(*cx, *cy)).norm() + r >= big - tol,
        _ => meets_by_crossings_circle(c, r, region),
    }
}

fn meets_line(n: Complex64, d: f64, region: &Region) -> bool {
    let tol = REGION_TOLERANCE * (1.0 + d.abs());
    match region {
        Region::Union { parts } => parts.iter().any(|p| meets_line(n, d, p)),
        Region::OutsideDisk { .. } => true,
        _ if region.is_convex() => {
            let (lo, hi) = region.support_range(n).expect("convex");
            lo <= d + tol && d <= hi + tol
        }
        Region::Annulus { cx, cy, r1, .. } => {
            let dist = (n.re * cx + n.im * cy - d).abs();
            dist <= r1 + tol
        }
        _ => meets_by_crossings_line(n, d, region),
    }
}

fn normalize_angle(a: f64) -> f64 {
    a.rem_euclid(std::f64::consts::TAU)
}

fn meets_by_crossings_circle(c: Complex64, r: f64, region: &Region) -> bool {
    let mut curves = Vec::new();
    region.boundary_curves(&mut curves);
    let mut angles = Vec::new();
    for curve in curves {
        match curve {
            Curve::Circle { c: k, r: rho } => {
                let delta = k - c;
                let d = delta.norm();
                if d < 1e-15 {
                    continue; // concentric: no isolated crossings
                }
                if d > r + rho || d < (r - rho).abs() {
                    continue;
                }
                let cos_a = ((r * r + d * d - rho * rho) / (2.0 * r * d)).clamp(-1.0, 1.0);
                let a = cos_a.acos();
                let phi = delta.arg();
                angles.push(normalize_angle(phi + a));
                angles.push(normalize_angle(phi - a));
            }
            Curve::Line { n, d } => {
                let s = n.re * c.re + n.im * c.im - d;
                if s.abs() > r {
                    continue;
                }
                let a = (-s / r).clamp(-1.0, 1.0).acos();
                let phi = n.arg();
                angles.push(normalize_angle(phi + a));
                angles.push(normalize_angle(phi - a));
            }
        }
    }
    let at = |theta: f64| c + Complex64::from_polar(r, theta);
    if angles.is_empty() {
        return region.contains(at(0.0));
    }
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    for (i, &a) in angles.iter().enumerate() {
        if region.contains(at(a)) {
            return true;
        }
        let next = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + std::f64::consts::TAU };
        if region.contains(at(0.5 * (a + next))) {
            return true;
        }
    }
    false
}

fn meets_by_crossings_line(n: Complex64, d: f64, region: &Region) -> bool {
    let mut curves = Vec::new();
    region.boundary_curves(&mut curves);
    let base = n * d;
    let dir = n * Complex64::i();
    let mut ts = Vec::new();
    for curve in curves {
        match curve {
            Curve::Circle { c, r } => {
                // |base + t·dir − c|² = r²
                let off = base - c;
                let b = (dir.conj() * off).re;
                let cc = off.norm_sqr() - r * r;
                let disc = b * b - cc;
                if disc < 0.0 {
                    continue;
                }
                let s = disc.sqrt();
                ts.push(-b - s);
                ts.push(-b + s);
            }
            Curve::Line { n: m, d: e } => {
                let along = (m.conj() * dir).re;
                if along.abs() < 1e-15 {
                    continue;
                }
                ts.push((e - (m.conj() * base).re) / along);
            }
        }
    }
    let at = |t: f64| base + dir * t;
    if ts.is_empty() {
        return region.contains(at(0.0));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let first = ts[0];
    let last = *ts.last().expect("nonempty");
    if region.contains(at(first - 1.0)) || region.contains(at(last + 1.0)) {
        return true;
    }
    for w in ts.windows(2) {
        if region.contains(at(w[0])) || region.contains(at(0.5 * (w[0] + w[1]))) {
            return true;
        }
    }
    region.contains(at(last))
}

/// Reference predicate: samples `n` points along the curve (lines are sampled
/// over the region's clipped bounding box). Test oracle only.
pub fn circle_meets_region_sampled(circle: &Circle<f64>, region: &Region, n: usize) -> bool {
    match circle.kind() {
        CircleKind::Circle => (0..n).any(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            region.contains(circle.point_at(theta))
        }),
        CircleKind::Line => {
            let b = region.clipped_bounds(&Bounds::new(-1e3, -1e3, 1e3, 1e3));
            let span = (b.x1 - b.x0).abs().hypot((b.y1 - b.y0).abs()) + 1.0;
            let mid = Complex64::new(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
            let nrm = circle.normal().expect("line");
            let foot = circle.point_at(0.0);
            let t0 = ((mid - foot) * (nrm * Complex64::i()).conj()).re;
            (0..=n).any(|k| {
                let t = t0 - span + 2.0 * span * k as f64 / n as f64;
                region.contains(circle.point_at(t))
            })
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |parts: &[Region]| parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Region::Rect { x0, y0, x1, y1 } => write!(f, "rect:{x0},{y0},{x1},{y1}"),
            Region::Disk { cx, cy, r } => write!(f, "disk:{cx},{cy},{r}"),
            Region::Annulus { cx, cy, r0, r1 } => write!(f, "annulus:{cx},{cy},{r0},{r1}"),
            Region::HalfPlane { nx, ny, d } => write!(f, "halfplane:{nx},{ny},{d}"),
            Region::OutsideDisk { cx, cy, r } => write!(f, "outside:{cx},{cy},{r}"),
            Region::TriangleT => write!(f, "triangleT"),
            Region::TruncatedT { eta, t } => write!(f, "truncT:{eta},{t}"),
            Region::Dilate { inner, eps } => write!(f, "dilate({inner},{eps})"),
            Region::Intersect { parts } => write!(f, "and({})", join(parts)),
            Region::Union { parts } => write!(f, "or({})", join(parts)),
            Region::Minus { bound, hole } => write!(f, "minus({bound},{hole})"),
        }
    }
}

fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
                }
            }
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    out.push(s[start..].trim());
    Ok(out)
}

fn parse_numbers(s: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let nums = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{what}: {x:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if nums.len() != expected {
        return Err(Error::Parse(format!("{what} takes {expected} numbers, got {}", nums.len())));
    }
    Ok(nums)
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Region> {
        let s = s.trim();
        if let Some(open) = s.find('(') {
            let name = s[..open].trim();
            if !s.ends_with(')') {
                return Err(Error::Parse(format!("expected ')' at end of {s:?}")));
            }
            let tokens = split_top_level(&s[open + 1..s.len() - 1])?;
            // Primitive arguments contain commas too, so numeric tokens are
            // glued back onto the region that precedes them.
            let eps_arg = |tokens: &[&str]| -> Result<(Region, f64)> {
                let (last, rest) = tokens
                    .split_last()
                    .filter(|(_, rest)| !rest.is_empty())
                    .ok_or_else(|| Error::Parse(format!("{name} takes (region, eps)")))?;
                let eps = last.parse::<f64>().map_err(|e| Error::Parse(format!("{name} eps: {e}")))?;
                Ok((rest.join(",").parse()?, eps))
            };
            let mut args: Vec<String> = Vec::new();
            for tok in &tokens {
                let starts_region = tok.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic());
                match args.last_mut() {
                    Some(prev) if !starts_region => {
                        prev.push(',');
                        prev.push_str(tok);
                    }
                    _ => args.push(tok.to_string()),
                }
            }
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            return match name {
                "dilate" => {
                    let (r, eps) = eps_arg(&tokens)?;
                    r.dilate(eps)
                }
                "erode" => {
                    let (r, eps) = eps_arg(&tokens)?;
                    r.erode(eps)
                }
                "and" => Ok(Region::Intersect { parts: args.iter().map(|a| a.parse()).collect::<Result<_>>()? }),
                "or" => Ok(Region::Union { parts: args.iter().map(|a| a.parse()).collect::<Result<_>>()? }),
                "minus" => {
                    if args.len() != 2 {
                        return Err(Error::Parse("minus takes (bound, hole)".into()));
                    }
                    Ok(Region::Minus { bound: Box::new(args[0].parse()?), hole: Box::new(args[1].parse()?) })
                }
                other => Err(Error::Parse(format!("unknown region combinator {other:?}"))),
            };
        }
        if s == "triangleT" {
            return Ok(Region::TriangleT);
        }
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("region {s:?} must look like name:args")))?;
        match name.trim() {
            "rect" => {
                let v = parse_numbers(rest, 4, "rect")?;
                Region::rect(v[0], v[1], v[2], v[3])
            }
            "disk" => {
                let v = parse_numbers(rest, 3, "disk")?;
                Region::disk(v[0], v[1], v[2])
            }
            "annulus" => {
                let v = parse_numbers(rest, 4, "annulus")?;
                Region::annulus(v[0], v[1], v[2], v[3])
            }
            "halfplane" => {
                let v = parse_numbers(rest, 3, "halfplane")?;
                Region::half_plane(Complex64::new(v[0], v[1]), v[2])
            }
            "outside" => {
                let v = parse_numbers(rest, 3, "outside")?;
                Region::outside_disk(v[0], v[1], v[2])
            }
            "truncT" => {
                let v = parse_numbers(rest, 2, "truncT")?;
                Region::truncated_triangle(v[0], v[1])
            }
            other => Err(Error::Parse(format!("unknown region primitive {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{circle_from_center_radius, line_from_normal_offset, unit_circle};

    fn circ(x: f64, y: f64, r: f64) -> Circle<f64> {
        circle_from_center_radius(Complex64::new(x, y), r).unwrap()
    }

    #[test]
    fn unit_circle_against_simple_regions() {
        let c = unit_circle::<f64>();
        assert!(circle_meets_region(&c, &Region::rect(-2.0, -2.0, 2.0, 2.0).unwrap()));
        assert!(!circle_meets_region(&c, &Region::disk(0.0, 0.0, 0.5).unwrap()));
        assert!(circle_meets_region(&c, &Region::disk(0.0, 0.0, 1.0).unwrap()));
        assert!(!circle_meets_region(&c, &Region::rect(-0.5, -0.5, 0.5, 0.5).unwrap()));
    }

    #[test]
    fn tangent_inner_circle_meets_triangle() {
        let c = circ(0.75, 1.0, 0.25);
        assert!(circle_meets_region(&c, &Region::TriangleT));
        // Inside the unit disk: no point of T.
        assert!(!circle_meets_region(&circ(0.0, 0.3, 0.2), &Region::TriangleT));
        // Straddling x = 1.
        assert!(circle_meets_region(&circ(1.1, 3.0, 0.2), &Region::TriangleT));
        assert!(!circle_meets_region(&circ(1.5, 3.0, 0.2), &Region::TriangleT));
    }

    #[test]
    fn lines_against_regions() {
        let x1 = line_from_normal_offset(Complex64::new(1.0, 0.0), 1.0).unwrap();
        let e = Region::rect(-1.0, 0.2, 1.0, 1.8).unwrap();
        assert!(circle_meets_region(&x1, &e));
        let x2 = line_from_normal_offset(Complex64::new(1.0, 0.0), 1.5).unwrap();
        assert!(!circle_meets_region(&x2, &e));
        assert!(circle_meets_region(&x2, &e.dilate(0.5).unwrap()));
        assert!(circle_meets_region(&x1, &Region::TriangleT));
        assert!(!circle_meets_region(&x2, &Region::TriangleT));
        assert!(circle_meets_region(&x2, &Region::outside_disk(0.0, 0.0, 10.0).unwrap()));
    }

    #[test]
    fn dilate_and_erode_nest() {
        let e = Region::rect(-1.0, 0.2, 1.0, 1.8).unwrap();
        let big = e.dilate(0.1).unwrap();
        let small = e.erode(0.1).unwrap();
        assert_eq!(small, Region::rect(-0.9, 0.30000000000000004, 0.9, 1.7).unwrap());
        for k in 0..200 {
            let p = Complex64::new(-1.3 + 0.013 * k as f64, 0.1 + 0.0095 * k as f64);
            if small.contains(p) {
                assert!(e.contains(p));
            }
            if e.contains(p) {
                assert!(big.contains(p));
            }
        }
        assert_eq!(e.dilate(0.1).unwrap().erode(0.1).unwrap(), e);
        assert!(Region::TriangleT.dilate(0.1).is_err());
    }

    #[test]
    fn collar_predicate() {
        let e = Region::rect(-1.0, -1.0, 1.0, 1.0).unwrap();
        let collar = Region::Minus { bound: Box::new(e.dilate(0.1).unwrap()), hole: Box::new(e.erode(0.1).unwrap()) };
        assert!(!circle_meets_region(&circ(0.0, 0.0, 0.5), &collar));
        assert!(circle_meets_region(&circ(0.0, 0.0, 0.95), &collar));
        assert!(circle_meets_region(&circ(0.0, 0.0, 5.0), &e.dilate(10.0).unwrap()));
        assert!(!circle_meets_region(&circ(0.0, 0.0, 5.0), &collar));
        assert!(circle_meets_region(&circ(1.05, 0.0, 0.01), &collar));
    }

    #[test]
    fn grammar_round_trip() {
        for text in [
            "rect:-1,0.2,1,1.8",
            "disk:0,0,2",
            "annulus:0,1,0.5,2",
            "triangleT",
            "truncT:0.1,0.001",
            "dilate(rect:-1,0.2,1,1.8,0.05)",
            "and(triangleT,disk:0,2,3)",
            "or(rect:0,0,1,1,disk:5,5,1)",
            "minus(dilate(rect:0,0,1,1,0.1),rect:0.1,0.1,0.9,0.9)",
        ] {
            let r: Region = text.parse().unwrap();
            let again: Region = r.to_string().parse().unwrap();
            assert_eq!(r, again, "{text}");
        }
        assert!("rect:1,2,3".parse::<Region>().is_err());
        assert!("blob:1".parse::<Region>().is_err());
        assert!("dilate(rect:0,0,1,1".parse::<Region>().is_err());
    }

    #[test]
    fn empty_region_meets_nothing() {
        let e = Region::rect(0.0, 0.0, 0.1, 0.1).unwrap().erode(1.0).unwrap();
        assert!(e.is_empty());
        assert!(!circle_meets_region(&unit_circle(), &e));
    }

    #[test]
    fn truncated_triangle_bounds() {
        let r = Region::truncated_triangle(0.25, 1.0 / 16.0).unwrap();
        let b = r.bounds().unwrap();
        assert!((b.y0 - 0.5).abs() < 1e-15 && (b.y1 - 2.0).abs() < 1e-15);
        assert!(circle_meets_region(&circ(0.0, 2.0, 0.5), &r));
        assert!(!circle_meets_region(&circ(0.0, 3.0, 0.5), &r));
    }
}
