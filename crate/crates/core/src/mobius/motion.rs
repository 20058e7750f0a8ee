//! Möbius and anti-Möbius transformations and their Lorentz action on
//! inversive coordinates.

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

use super::circle::{Circle, CircleKind};
use super::scalar::Scalar;
use crate::error::{invalid, Result};

/// A point of the extended complex plane.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint<S> {
    Finite(Complex<S>),
    Infinity,
}

impl<S: Scalar> BoundaryPoint<S> {
    pub fn to_float(&self) -> BoundaryPoint<f64> {
        match self {
            BoundaryPoint::Finite(z) => BoundaryPoint::Finite(Complex::new(z.re.to_f64(), z.im.to_f64())),
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        }
    }
}

/// `z ↦ (a z + b)/(c z + d)` or, when `conj` is set, `z ↦ (a z̄ + b)/(c z̄ + d)`.
///
/// The matrix has determinant 1 (exactly on the exact backend, to 1e-12
/// after normalization on floats); `m` and `-m` are the same motion.
#[derive(Clone, Debug, PartialEq)]
pub struct Motion<S> {
    m: [[Complex<S>; 2]; 2],
    conj: bool,
}

fn c<S: Scalar>(re: S, im: S) -> Complex<S> {
    Complex::new(re, im)
}

fn conj<S: Scalar>(z: &Complex<S>) -> Complex<S> {
    Complex::new(z.re.clone(), -z.im.clone())
}

fn det<S: Scalar>(m: &[[Complex<S>; 2]; 2]) -> Complex<S> {
    m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
}

impl Motion<f64> {
    /// Normalizes an arbitrary invertible float matrix to determinant 1.
    pub fn from_matrix(m: [[Complex64; 2]; 2], conj: bool) -> Result<Self> {
        let d = det(&m);
        if d.norm() < 1e-300 || !d.is_finite() {
            return Err(invalid("motion matrix is singular"));
        }
        let s = d.sqrt();
        let m = [[m[0][0] / s, m[0][1] / s], [m[1][0] / s, m[1][1] / s]];
        let motion = Self { m, conj };
        debug_assert!((motion.det() - Complex64::one()).norm() <= 1e-12);
        Ok(motion)
    }
}

impl<S: Scalar> Motion<S> {
    /// Requires the determinant to be 1 (within float tolerance).
    pub fn new(m: [[Complex<S>; 2]; 2], conj: bool) -> Result<Self> {
        let d = det(&m);
        let err = (d.re.to_f64() - 1.0).abs() + d.im.to_f64().abs();
        let ok = if S::EXACT { d == Complex::one() } else { err <= 1e-12 };
        if !ok {
            return Err(invalid(format!("motion determinant must be 1, got {d:?}")));
        }
        Ok(Self { m, conj })
    }

    pub fn identity() -> Self {
        Self {
            m: [
                [Complex::one(), Complex::zero()],
                [Complex::zero(), Complex::one()],
            ],
            conj: false,
        }
    }

    pub fn translation(t: Complex<S>) -> Self {
        Self {
            m: [[Complex::one(), t], [Complex::zero(), Complex::one()]],
            conj: false,
        }
    }

    /// `z ↦ s²·z`, as the determinant-one matrix `diag(s, 1/s)`.
    pub fn scaling_sqrt(s: S) -> Self {
        let inv = S::one() / s.clone();
        Self {
            m: [
                [c(s, S::zero()), Complex::zero()],
                [Complex::zero(), c(inv, S::zero())],
            ],
            conj: false,
        }
    }

    /// Inversion in `mirror` as an anti-Möbius motion.
    pub fn reflection(mirror: &Circle<S>) -> Self {
        let [bbar, b, wx, wy] = mirror.coords().clone();
        // (w z̄ - bbar)/(b z̄ - w̄) has determinant -Q = -1; multiplying by -i
        // brings it to +1.
        let w = c(wx.clone(), wy.clone());
        let w_bar = c(wx, -wy);
        let raw = [
            [w, c(-bbar, S::zero())],
            [c(b, S::zero()), -w_bar],
        ];
        let minus_i = c(S::zero(), -S::one());
        let m = [
            [minus_i.clone() * raw[0][0].clone(), minus_i.clone() * raw[0][1].clone()],
            [minus_i.clone() * raw[1][0].clone(), minus_i * raw[1][1].clone()],
        ];
        Self { m, conj: true }
    }

    /// The mirror of a reflection, if this motion is one.
    pub fn mirror(&self) -> Option<Circle<S>> {
        if !self.conj {
            return None;
        }
        // Undo the factor -i of `reflection`: n = [[w, -bbar], [b, -w̄]].
        let i = c(S::zero(), S::one());
        let n = self.m.clone().map(|row| row.map(|z| i.clone() * z));
        let real = |z: &Complex<S>| z.im.is_negligible();
        let anti = n[1][1].clone() + conj(&n[0][0]);
        if !(real(&n[0][1]) && real(&n[1][0]) && anti.re.is_negligible() && anti.im.is_negligible()) {
            return None;
        }
        let w = n[0][0].clone();
        Circle::from_coords(-n[0][1].re.clone(), n[1][0].re.clone(), w.re, w.im).ok()
    }

    pub fn matrix(&self) -> &[[Complex<S>; 2]; 2] {
        &self.m
    }

    pub fn is_anti(&self) -> bool {
        self.conj
    }

    pub fn det(&self) -> Complex<S> {
        det(&self.m)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let rhs = if self.conj {
            other.m.clone().map(|row| row.map(|z| conj(&z)))
        } else {
            other.m.clone()
        };
        let a = &self.m;
        let m = [
            [
                a[0][0].clone() * rhs[0][0].clone() + a[0][1].clone() * rhs[1][0].clone(),
                a[0][0].clone() * rhs[0][1].clone() + a[0][1].clone() * rhs[1][1].clone(),
            ],
            [
                a[1][0].clone() * rhs[0][0].clone() + a[1][1].clone() * rhs[1][0].clone(),
                a[1][0].clone() * rhs[0][1].clone() + a[1][1].clone() * rhs[1][1].clone(),
            ],
        ];
        Self { m, conj: self.conj ^ other.conj }
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [cc, d]] = self.m.clone();
        let adj = [[d, -b], [-cc, a]];
        let m = if self.conj {
            adj.map(|row| row.map(|z| conj(&z)))
        } else {
            adj
        };
        Self { m, conj: self.conj }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Self::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// Action on the extended plane; total, with `∞` and poles handled.
    pub fn apply_point(&self, p: &BoundaryPoint<S>) -> BoundaryPoint<S> {
        let [[a, b], [cc, d]] = &self.m;
        match p {
            BoundaryPoint::Infinity => {
                if cc.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(a.clone() / cc.clone())
                }
            }
            BoundaryPoint::Finite(z) => {
                let z = if self.conj { conj(z) } else { z.clone() };
                let num = a.clone() * z.clone() + b.clone();
                let den = cc.clone() * z + d.clone();
                let den_zero = if S::EXACT {
                    den.is_zero()
                } else {
                    den.re.to_f64().hypot(den.im.to_f64()) < 1e-300
                };
                if den_zero {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(num / den)
                }
            }
        }
    }

    /// The 4×4 Lorentz matrix acting on `(bbar, b, wx, wy)`.
    pub fn lorentz(&self) -> LorentzMap<S> {
        let mut cols: [[S; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for (j, col) in cols.iter_mut().enumerate() {
            let mut e: [S; 4] = std::array::from_fn(|_| S::zero());
            e[j] = S::one();
            *col = self.act_linear(&e);
        }
        let m = std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()));
        LorentzMap { m }
    }

    /// Linear action on a (not necessarily normalized) coordinate vector:
    /// the Hermitian form `H = [[b, -w], [-w̄, bbar]]` maps to `A* H A` with
    /// `A = m⁻¹`, after conjugating `w` for anti-Möbius maps.
    fn act_linear(&self, v: &[S; 4]) -> [S; 4] {
        let [bbar, b, wx, wy] = v.clone();
        let wy = if self.conj { -wy } else { wy };
        let w = c(wx, wy);
        let h = [
            [c(b, S::zero()), -w.clone()],
            [-conj(&w), c(bbar, S::zero())],
        ];
        let [[a11, a12], [a21, a22]] = self.m.clone();
        let inv = [[a22, -a12], [-a21, a11]];
        // H A
        let ha: [[Complex<S>; 2]; 2] = std::array::from_fn(|i| {
            std::array::from_fn(|j| h[i][0].clone() * inv[0][j].clone() + h[i][1].clone() * inv[1][j].clone())
        });
        // A* (H A)
        let out: [[Complex<S>; 2]; 2] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                conj(&inv[0][i]) * ha[0][j].clone() + conj(&inv[1][i]) * ha[1][j].clone()
            })
        });
        let w_new = -out[0][1].clone();
        [out[1][1].re.clone(), out[0][0].re.clone(), w_new.re, w_new.im]
    }

    /// Image of a circle or line, in canonical form.
    pub fn apply_circle(&self, circle: &Circle<S>) -> Circle<S> {
        Circle::canonical(self.act_linear(circle.coords()))
    }

    pub fn to_float(&self) -> Motion<f64> {
        let m = self
            .m
            .clone()
            .map(|row| row.map(|z| Complex64::new(z.re.to_f64(), z.im.to_f64())));
        Motion::from_matrix(m, self.conj).expect("determinant-one matrix stays invertible")
    }
}

/// Image of `circle` under `g`; free-function form of [`Motion::apply_circle`].
pub fn apply_motion<S: Scalar>(g: &Motion<S>, circle: &Circle<S>) -> Circle<S> {
    g.apply_circle(circle)
}

/// A linear map on inversive coordinates preserving the Lorentz form.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMap<S> {
    m: [[S; 4]; 4],
}

impl<S: Scalar> LorentzMap<S> {
    pub fn identity() -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() })),
        }
    }

    /// Lorentz reflection in a circle or line with `Q(m) = 1`.
    pub fn reflection(mirror: &Circle<S>) -> Self {
        let mv = mirror.coords();
        let two = S::one() + S::one();
        // ⟨v, m⟩ = g · v with g the coefficient vector below.
        let g = [-mv[1].half(), -mv[0].half(), mv[2].clone(), mv[3].clone()];
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let delta = if i == j { S::one() } else { S::zero() };
                delta - two.clone() * mv[i].clone() * g[j].clone()
            })
        });
        Self { m }
    }

    pub fn entries(&self) -> &[[S; 4]; 4] {
        &self.m
    }

    pub fn apply(&self, v: &[S; 4]) -> [S; 4] {
        std::array::from_fn(|i| {
            let row = &self.m[i];
            let mut acc = S::zero();
            for (a, x) in row.iter().zip(v.iter()) {
                if !a.is_zero_exact() {
                    acc = acc + a.clone() * x.clone();
                }
            }
            acc
        })
    }

    pub fn apply_circle(&self, circle: &Circle<S>) -> Circle<S> {
        Circle::canonical(self.apply(circle.coords()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = S::zero();
                for k in 0..4 {
                    acc = acc + self.m[i][k].clone() * other.m[k][j].clone();
                }
                acc
            })
        });
        Self { m }
    }
}

/// The circle or line through three distinct points of the extended plane.
/// Used as an independent oracle for the Lorentz action.
pub fn circle_through(points: [BoundaryPoint<f64>; 3]) -> Result<Circle<f64>> {
    let finite: Vec<Complex64> = points
        .iter()
        .filter_map(|p| match p {
            BoundaryPoint::Finite(z) => Some(*z),
            BoundaryPoint::Infinity => None,
        })
        .collect();
    let line_through = |p: Complex64, q: Complex64| -> Result<Circle<f64>> {
        let dir = q - p;
        if dir.norm() < 1e-300 {
            return Err(invalid("points are not distinct"));
        }
        let n = dir * Complex64::i() / dir.norm();
        let d = (n.conj() * p).re;
        Circle::line(n.re, n.im, d)
    };
    match finite.len() {
        2 => line_through(finite[0], finite[1]),
        3 => {
            let (a, b, cc) = (finite[0], finite[1], finite[2]);
            let cross = ((b - a).conj() * (cc - a)).im;
            let scale = (b - a).norm() * (cc - a).norm();
            if cross.abs() <= 1e-14 * scale {
                return line_through(a, if (b - a).norm() > (cc - a).norm() { b } else { cc });
            }
            // Circumcenter from the perpendicular-bisector equations.
            let (ax, ay, bx, by, cx, cy) = (a.re, a.im, b.re, b.im, cc.re, cc.im);
            let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
            let a2 = ax * ax + ay * ay;
            let b2 = bx * bx + by * by;
            let c2 = cx * cx + cy * cy;
            let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
            let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
            let center = Complex64::new(ux, uy);
            let r = (a - center).norm();
            Circle::with_center_radius(ux, uy, r)
        }
        _ => Err(invalid("at most one point may be infinite")),
    }
}

/// Three distinct points on a circle or line; used with [`circle_through`].
pub fn sample_points(circle: &Circle<f64>) -> [BoundaryPoint<f64>; 3] {
    match circle.kind() {
        CircleKind::Circle => [0.3, 2.4, 4.4].map(|t| BoundaryPoint::Finite(circle.point_at(t))),
        CircleKind::Line => [-1.0, 0.0, 1.5].map(|t| BoundaryPoint::Finite(circle.point_at(t))),
    }
}
