//! Circles and lines in inversive coordinates.
//!
//! A circle `|z - c| = r` is stored as `(bbar, b, wx, wy)` with curvature
//! `b = 1/r`, `(wx, wy) = b·c` and co-curvature `bbar = b|c|² - r`. A line
//! `Re(n̄ z) = d` with `|n| = 1` is `(2d, 0, n.re, n.im)`. The quadratic form
//! `Q(v) = wx² + wy² - bbar·b` equals 1 on every normalized vector, and
//! Möbius maps act on these vectors by Lorentz transformations of `Q`.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scalar::{Scalar, FLOAT_TOLERANCE};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleKind {
    Circle,
    Line,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circle<S> {
    v: [S; 4],
}

impl<S: Scalar> Circle<S> {
    /// Builds a circle from raw coordinates, checking the quadratic form and
    /// bringing the vector to canonical sign.
    pub fn from_coords(bbar: S, b: S, wx: S, wy: S) -> Result<Self> {
        let v = [bbar, b, wx, wy];
        let q = quadratic_form(&v);
        let deviation = (q - S::one()).abs_val().to_f64();
        // Float tolerance is relative to the size of the terms that cancel in Q.
        let scale = v[2].to_f64().powi(2) + v[3].to_f64().powi(2) + (v[0].to_f64() * v[1].to_f64()).abs();
        if deviation > S::tolerance().to_f64() * scale.max(1.0) {
            return Err(invalid(format!(
                "inversive coordinates have Q = {:?}, expected 1",
                quadratic_form(&v)
            )));
        }
        Ok(Self::canonical(v))
    }

    /// Canonical representative of a vector with `Q = 1`: curvature
    /// nonnegative, and for lines the first nonzero normal component positive.
    pub(crate) fn canonical(v: [S; 4]) -> Self {
        let [mut bbar, mut b, mut wx, mut wy] = v;
        if b.is_negligible() {
            b = S::zero();
        }
        let flip = if b.is_zero_exact() {
            if !wx.is_negligible() {
                wx < S::zero()
            } else {
                wy < S::zero()
            }
        } else {
            b < S::zero()
        };
        if flip {
            bbar = -bbar;
            b = -b;
            wx = -wx;
            wy = -wy;
        }
        Self {
            v: S::renormalize([bbar, b, wx, wy]),
        }
    }

    pub fn with_center_radius(cx: S, cy: S, r: S) -> Result<Self> {
        if r <= S::zero() {
            return Err(invalid(format!("radius must be positive, got {r:?}")));
        }
        let b = S::one() / r.clone();
        let bbar = (cx.clone() * cx.clone() + cy.clone() * cy.clone() - r.clone() * r.clone())
            / r.clone();
        let wx = cx / r.clone();
        let wy = cy / r;
        Self::from_coords(bbar, b, wx, wy)
    }

    /// The line `{z : Re(n̄ z) = d}` for a unit normal `n = nx + i·ny`.
    pub fn line(nx: S, ny: S, d: S) -> Result<Self> {
        let norm = nx.clone() * nx.clone() + ny.clone() * ny.clone();
        if (norm - S::one()).abs_val() > S::tolerance() {
            return Err(invalid("line normal must have unit length"));
        }
        let two = S::one() + S::one();
        Self::from_coords(two * d, S::zero(), nx, ny)
    }

    pub fn coords(&self) -> &[S; 4] {
        &self.v
    }

    pub fn into_coords(self) -> [S; 4] {
        self.v
    }

    pub fn bbar(&self) -> &S {
        &self.v[0]
    }

    pub fn b(&self) -> &S {
        &self.v[1]
    }

    pub fn wx(&self) -> &S {
        &self.v[2]
    }

    pub fn wy(&self) -> &S {
        &self.v[3]
    }

    pub fn kind(&self) -> CircleKind {
        if self.v[1].is_zero_exact() {
            CircleKind::Line
        } else {
            CircleKind::Circle
        }
    }

    pub fn is_line(&self) -> bool {
        self.kind() == CircleKind::Line
    }

    /// Euclidean curvature; zero for lines.
    pub fn curvature(&self) -> S {
        self.v[1].clone()
    }

    pub fn quadratic_form(&self) -> S {
        quadratic_form(&self.v)
    }

    /// Lorentz bilinear form. Equals -1 for externally tangent circles, 0
    /// for orthogonal ones, and 1 for a circle with itself.
    pub fn inversive_product(&self, other: &Self) -> S {
        bilinear(&self.v, &other.v)
    }

    /// Exact center `(wx/b, wy/b)` when this is a circle.
    pub fn center_exact(&self) -> Option<(S, S)> {
        if self.is_line() {
            None
        } else {
            let b = self.v[1].clone();
            Some((self.v[2].clone() / b.clone(), self.v[3].clone() / b))
        }
    }

    pub fn radius_exact(&self) -> Option<S> {
        (!self.is_line()).then(|| S::one() / self.v[1].clone())
    }

    pub fn center(&self) -> Option<Complex64> {
        if self.is_line() {
            return None;
        }
        let b = self.v[1].to_f64();
        Some(Complex64::new(self.v[2].to_f64() / b, self.v[3].to_f64() / b))
    }

    pub fn radius(&self) -> Option<f64> {
        (!self.is_line()).then(|| 1.0 / self.v[1].to_f64())
    }

    /// Unit normal of a line.
    pub fn normal(&self) -> Option<Complex64> {
        self.is_line()
            .then(|| Complex64::new(self.v[2].to_f64(), self.v[3].to_f64()))
    }

    /// Offset `d` of a line `Re(n̄ z) = d`.
    pub fn offset(&self) -> Option<f64> {
        self.is_line().then(|| self.v[0].to_f64() / 2.0)
    }

    pub fn to_float(&self) -> Circle<f64> {
        Circle::canonical([
            self.v[0].to_f64(),
            self.v[1].to_f64(),
            self.v[2].to_f64(),
            self.v[3].to_f64(),
        ])
    }

    pub fn dedup_key(&self, quantum: f64) -> S::Key {
        S::dedup_keys(&self.v, quantum).0
    }

    /// Same circle under the backend's equality (exact, or within `tol` for floats).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.v
            .iter()
            .zip(other.v.iter())
            .all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= tol)
    }

    /// Canonical order: curvature, then center lexicographically. Lines come
    /// first and are ordered by normal and offset.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let ord = |a: &S, b: &S| a.partial_cmp(b).unwrap_or(Ordering::Equal);
        match ord(&self.v[1], &other.v[1]) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self.center_exact(), other.center_exact()) {
            (Some((ax, ay)), Some((bx, by))) => ord(&ax, &bx)
                .then_with(|| ord(&ay, &by))
                .then_with(|| ord(&self.v[0], &other.v[0])),
            _ => ord(&self.v[2], &other.v[2])
                .then_with(|| ord(&self.v[3], &other.v[3]))
                .then_with(|| ord(&self.v[0], &other.v[0])),
        }
    }

    /// Image under the Euclidean translation `z ↦ z + (tx + i·ty)`.
    pub fn translated(&self, tx: &S, ty: &S) -> Self {
        let [bbar, b, wx, wy] = self.v.clone();
        let two = S::one() + S::one();
        // |c + t|² b - r  with c = w/b expands to  bbar + 2 Re(w t̄) + b|t|².
        let new_bbar = bbar
            + two * (wx.clone() * tx.clone() + wy.clone() * ty.clone())
            + b.clone() * (tx.clone() * tx.clone() + ty.clone() * ty.clone());
        let new_wx = wx + b.clone() * tx.clone();
        let new_wy = wy + b.clone() * ty.clone();
        Self::canonical([new_bbar, b, new_wx, new_wy])
    }
}

impl Circle<f64> {
    /// Point on the curve at parameter `theta` (angle for circles, signed
    /// arc length from the foot point for lines).
    pub fn point_at(&self, theta: f64) -> Complex64 {
        match (self.center(), self.radius()) {
            (Some(c), Some(r)) => c + Complex64::from_polar(r, theta),
            _ => {
                let n = self.normal().expect("line");
                let d = self.offset().expect("line");
                n * d + n * Complex64::i() * theta
            }
        }
    }
}

pub(crate) fn quadratic_form<S: Scalar>(v: &[S; 4]) -> S {
    bilinear(v, v)
}

pub(crate) fn bilinear<S: Scalar>(u: &[S; 4], v: &[S; 4]) -> S {
    let cross = u[0].clone() * v[1].clone() + u[1].clone() * v[0].clone();
    u[2].clone() * v[2].clone() + u[3].clone() * v[3].clone() - cross.half()
}

/// Circle `|z - c| = r` (float backend).
pub fn circle_from_center_radius(c: Complex64, r: f64) -> Result<Circle<f64>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!("radius must be positive and finite, got {r}")));
    }
    if !(c.re.is_finite() && c.im.is_finite()) {
        return Err(invalid("center must be finite"));
    }
    Circle::with_center_radius(c.re, c.im, r)
}

/// Line `{z : Re(n̄ z) = d}` (float backend); `n` must be a unit vector.
pub fn line_from_normal_offset(n: Complex64, d: f64) -> Result<Circle<f64>> {
    if (n.norm() - 1.0).abs() > FLOAT_TOLERANCE || !d.is_finite() {
        return Err(invalid(format!("line normal must be a unit vector, got |n| = {}", n.norm())));
    }
    Circle::line(n.re, n.im, d)
}

/// Inversion of `c` in the circle or line `mirror`, computed as the Lorentz
/// reflection `v ↦ v - 2⟨v, m⟩ m / ⟨m, m⟩`.
pub fn reflect_in<S: Scalar>(mirror: &Circle<S>, c: &Circle<S>) -> Circle<S> {
    if !S::EXACT {
        // Tiny images far from the origin have huge inversive coordinates,
        // and the linear formula loses digits to cancellation there.
        if let Some(img) = invert_circle(&mirror.to_float(), &c.to_float()) {
            if let Some(v) = img.v.iter().map(|x| S::from_f64(*x)).collect::<Option<Vec<S>>>() {
                return Circle::canonical([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]);
            }
        }
    }
    let m = mirror.coords();
    let v = c.coords();
    let scale = (bilinear(v, m) + bilinear(v, m)) / quadratic_form(m);
    let mut out = v.clone();
    for (o, mi) in out.iter_mut().zip(m.iter()) {
        *o = o.clone() - scale.clone() * mi.clone();
    }
    Circle::canonical(out)
}

/// Unit circle helper used throughout tests and presets.
/// Inversion in a circular mirror through centers, radii and line offsets.
/// Images passing within rounding of the mirror's center become lines.
fn invert_circle(mirror: &Circle<f64>, c: &Circle<f64>) -> Option<Circle<f64>> {
    let (a, rho) = (mirror.center()?, mirror.radius()?);
    let rho2 = rho * rho;
    if let (Some(z), Some(r)) = (c.center(), c.radius()) {
        let d = z - a;
        let denom = d.norm_sqr() - r * r;
        if denom.abs() <= 1e-9 * (d.norm_sqr() + r * r) {
            if d.norm() == 0.0 {
                return None;
            }
            let n = d / d.norm();
            return line_from_normal_offset(n, (n.conj() * a).re + rho2 / (2.0 * r)).ok();
        }
        let k = rho2 / denom;
        return circle_from_center_radius(a + d * k, r * k.abs()).ok();
    }
    let (n, offset) = (c.normal()?, c.offset()?);
    let s = offset - (n.conj() * a).re;
    if s.abs() <= 1e-12 * (1.0 + offset.abs()) {
        return Some(c.clone());
    }
    circle_from_center_radius(a + n * (rho2 / (2.0 * s)), rho2 / (2.0 * s.abs())).ok()
}

pub fn unit_circle<S: Scalar>() -> Circle<S> {
    Circle::with_center_radius(S::zero(), S::zero(), S::one()).expect("unit circle")
}
