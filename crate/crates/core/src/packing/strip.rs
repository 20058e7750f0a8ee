//! The Apollonian strip packing and the packing of the ideal triangle.

use num_complex::Complex;
use num_traits::One;

use super::{enumerate_orbit, Backend, CircleSet, EnumConfig, MotionRecord, PackingSpec, Provenance, StopReason};
use crate::counting::{circle_meets_region, Region};
use crate::error::{Error, Result};
use crate::mobius::{beta, beta_inverse, rat, Circle, Motion, Rational, Scalar};

fn int<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

fn strip_support() -> Region {
    Region::Intersect {
        parts: vec![
            Region::HalfPlane { nx: 1.0, ny: 0.0, d: 1.0 },
            Region::HalfPlane { nx: -1.0, ny: 0.0, d: 1.0 },
        ],
    }
}

/// The packing of the strip `|Re z| ≤ 1` generated from the lines `x = ±1`
/// and the unit circles at `0` and `2i`, by reflection in the four dual
/// circles `|z − (±1 + i)| = 1`, `y = 0` and `y = 2`.
pub fn strip_apollonian_spec<S: Scalar>() -> Result<PackingSpec<S>> {
    let seeds = vec![
        Circle::line(int(1), int(0), int(1))?,
        Circle::line(int(1), int(0), int(-1))?,
        Circle::with_center_radius(int(0), int(0), int(1))?,
        Circle::with_center_radius(int(0), int(2), int(1))?,
    ];
    let mirrors = [
        Circle::with_center_radius(int(1), int(1), int(1))?,
        Circle::with_center_radius(int(-1), int(1), int(1))?,
        Circle::line(int(0), int(1), int(0))?,
        Circle::line(int(0), int(1), int(2))?,
    ];
    let generators: Vec<Motion<S>> = mirrors.iter().map(Motion::reflection).collect();
    let mut spec = PackingSpec {
        name: "strip-apollonian".into(),
        seeds,
        generators,
        period: None,
        monotone: true,
        support: Some(strip_support()),
    };
    let half_period = Motion::translation(Complex::new(S::zero(), int(2)));
    spec.period = if preserves_packing(&spec, &half_period)? {
        Some(half_period)
    } else {
        // The product of the two line reflections is always a symmetry.
        Some(spec.generators[3].compose(&spec.generators[2]))
    };
    Ok(spec)
}

/// Checks on a small enumeration that `g` maps circles of the packing to
/// circles of the packing.
fn preserves_packing<S: Scalar>(spec: &PackingSpec<S>, g: &Motion<S>) -> Result<bool> {
    let probe = EnumConfig::new(12.0, Region::rect(-1.0, -4.0, 1.0, 8.0)?);
    let set = enumerate_orbit(spec, &probe)?;
    let inner = Region::rect(-1.0, -1.0, 1.0, 3.0)?;
    let tol = 1e-9;
    for c in set.circles.iter().filter(|c| circle_meets_region(&c.to_float(), &inner)) {
        let image = g.apply_circle(c);
        let found = set.circles.iter().any(|d| d.approx_eq(&image, tol));
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rotation `z ↦ (z − 3)/(z + 1)` of order three. It preserves the ideal
/// triangle with vertices `∞, 1, −1`, cycling them in that order, and fixes
/// the hyperbolic center `i√3` of the incircle `|z − 2i| = 1`.
pub fn g0<S: Scalar>() -> Motion<S> {
    let h = S::one().half();
    let re = |x: S| Complex::new(x, S::zero());
    Motion::new(
        [[re(h.clone()), re(-(h.clone() + S::one()))], [re(h.clone()), re(h)]],
        false,
    )
    .expect("det is one")
}

/// True iff the closed disk of `c` lies in `{|Re z| ≤ 1, |z| ≥ 1, Im z > 0}`.
pub fn in_ideal_triangle<S: Scalar>(c: &Circle<S>) -> bool {
    let (b, wx, wy) = (c.b().clone(), c.wx().clone(), c.wy().clone());
    if c.is_line() || wy <= S::zero() {
        return false;
    }
    let tol = S::tolerance() * (S::one() + b.clone());
    let one = S::one();
    wx.abs_val() + one.clone() <= b.clone() + tol.clone()
        && wx.clone() * wx + wy.clone() * wy + tol.clone() * (b.clone() + one.clone()) >= (b.clone() + one.clone()) * (b + one)
}

pub fn ideal_triangle_filter<S: Scalar>(set: &CircleSet<S>) -> CircleSet<S> {
    let circles = set.circles.iter().filter(|c| in_ideal_triangle(*c)).cloned().collect();
    let mut provenance = set.provenance.clone();
    provenance.window = Region::TriangleT;
    provenance.derivations.push("restricted to disks inside the ideal triangle".into());
    CircleSet { circles, provenance }
}

/// Union of `τ^k(S)` over `|k| ≤ k_max`, deduplicated, where `τ` is the
/// set's declared period (a vertical translation by `p·i`).
pub fn period_extend<S: Scalar>(set: &CircleSet<S>, k_max: i64) -> Result<CircleSet<S>> {
    let record = set
        .provenance
        .period
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("circle set declares no period".into()))?;
    let g: Motion<S> = record.to_motion()?;
    let [[a, t], [c, d]] = g.matrix().clone();
    let unit = |z: &Complex<S>| z.im.is_zero_exact() && (z.re == S::one() || z.re == -S::one());
    if g.is_anti() || !c.re.is_zero_exact() || !c.im.is_zero_exact() || !unit(&a) || a != d || !t.re.is_zero_exact() {
        return Err(Error::Unsupported("period extension needs a vertical translation".into()));
    }
    let p = t.im.clone() / a.re.clone();
    if p <= S::zero() || k_max < 0 {
        return Err(Error::InvalidArgument(format!("period {p:?}, k_max {k_max}")));
    }
    let period = p.to_f64();
    let mut seen = std::collections::HashSet::new();
    let mut circles = Vec::with_capacity(set.circles.len() * (2 * k_max as usize + 1));
    for k in -k_max..=k_max {
        let ty = S::from_i64(k) * p.clone();
        for c in &set.circles {
            let shifted = c.translated(&S::zero(), &ty);
            S::check_magnitude(shifted.coords())?;
            if seen.insert(shifted.dedup_key(1e-9)) {
                circles.push(shifted);
            }
        }
    }
    let mut provenance = set.provenance.clone();
    provenance.derivations.push(format!("period extension by {period}i, |k| <= {k_max}"));
    provenance.stop_reason = StopReason::Derived;
    // Circles centered below the base block are gone, so the window
    // guarantee no longer holds; area and cusp counters use
    // `period_blocks` and the curvature cutoff instead.
    provenance.complete = false;
    provenance.period_blocks = Some(k_max);
    let mut out = CircleSet { circles, provenance };
    out.sort_canonical();
    Ok(out)
}

/// Membership in the fundamental domain of `⟨g0⟩` around the cusp at `∞`:
/// hyperbolic center `h` with `|h − 1| ≥ 2` and `|h + 1| ≥ 2`. The boundary
/// ray on `|h − 1| = 2` is included and the one on `|h + 1| = 2` excluded.
/// The rotation center itself belongs to no sector.
///
/// Uses `|h|² = bbar/b` and `Re h = wx/b`, so the test is exact.
pub fn d_infinity_sector<S: Scalar>(c: &Circle<S>) -> bool {
    if c.is_line() {
        return false;
    }
    let (bbar, b, wx) = (c.bbar().clone(), c.b().clone(), c.wx().clone());
    let two = S::one() + S::one();
    let three = two.clone() + S::one();
    let f = bbar - three * b - two * wx.abs_val();
    f > S::zero() || (f == S::zero() && wx > S::zero())
}

/// Parameters of the ideal-triangle construction for an area threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrianglePlan {
    /// Strip curvature cutoff.
    pub max_curvature: i64,
    /// Number of period translates beyond the base block.
    pub k_max: i64,
    /// The result is complete for hyperbolic areas strictly above this.
    pub area_floor: f64,
}

/// Sector circles with center height `y` satisfy `y ≥ √3` and `y ≤ 1/s`,
/// where `s = r/y` is strictly increasing in hyperbolic area. So a ratio
/// floor `β` needs curvatures below `1/(√3 β)` and heights up to `1/β`.
pub fn triangle_floor(max_curvature: i64, k_max: i64) -> Result<f64> {
    let ratio = (1.0 / (3f64.sqrt() * max_curvature as f64)).max(1.0 / (2.0 * k_max as f64 + 2.0));
    beta_inverse(ratio)
}

impl TrianglePlan {
    pub fn for_area(t_min: f64) -> Result<TrianglePlan> {
        let b = beta(t_min)?;
        if b >= 1.0 {
            return Err(Error::InvalidArgument(format!("area threshold {t_min} too large")));
        }
        let max_curvature = (1.0 / (3f64.sqrt() * b)).ceil() as i64 + 1;
        let k_max = (1.0 / (2.0 * b)).ceil() as i64;
        let area_floor = triangle_floor(max_curvature, k_max)?;
        debug_assert!(area_floor <= t_min);
        Ok(TrianglePlan { max_curvature, k_max, area_floor })
    }
}

/// The circles of the strip packing inside the ideal triangle with
/// vertices `∞, ±1`, complete for hyperbolic area above
/// `TrianglePlan::for_area(t_min).area_floor ≤ t_min`.
///
/// The cusp at `∞` is enumerated directly: strip search to the planned
/// curvature, period extension, restriction to the `∞` sector. The other two
/// cusp regions are the images of that sector under `g0` and `g0²`, which
/// would otherwise need curvatures growing like `1/t`.
pub fn ideal_triangle_packing(t_min: f64) -> Result<CircleSet<Rational>> {
    let plan = TrianglePlan::for_area(t_min)?;
    let spec = strip_apollonian_spec::<Rational>()?;
    let strip = enumerate_orbit(&spec, &EnumConfig::new(plan.max_curvature as f64, Region::rect(-1.0, 0.0, 1.0, 2.0)?))?;
    if !strip.provenance.complete {
        return Err(Error::Incomplete("strip enumeration did not finish".into()));
    }
    let ratio_floor = crate::mobius::beta(plan.area_floor)?;
    let wy_cap = 1.0 / ratio_floor;
    let extended = period_extend(&strip, plan.k_max)?;
    let sector: Vec<Circle<Rational>> = extended
        .circles
        .into_iter()
        .filter(|c| in_ideal_triangle(c) && d_infinity_sector(c) && c.wy().to_f64() <= wy_cap)
        .collect();

    let g = g0::<Rational>().lorentz();
    let g2 = g.compose(&g);
    let mut circles = Vec::with_capacity(3 * sector.len() + 1);
    circles.push(Circle::with_center_radius(rat(0, 1), rat(2, 1), Rational::one())?);
    for c in &sector {
        for m in [&g, &g2] {
            let v = m.apply(c.coords());
            Rational::check_magnitude(&v)?;
            circles.push(m.apply_circle(c));
        }
    }
    circles.extend(sector);
    circles.sort_by(|a, b| a.canonical_cmp(b));

    Ok(CircleSet {
        circles,
        provenance: Provenance {
            packing: "ideal-triangle".into(),
            backend: Backend::Exact,
            max_curvature: None,
            window: Region::TriangleT,
            support: Some(Region::TriangleT),
            complete: true,
            stop_reason: StopReason::Derived,
            levels: strip.provenance.levels,
            generated: strip.provenance.generated,
            area_floor: Some(plan.area_floor),
            period: None,
            period_blocks: Some(plan.k_max),
            derivations: vec![
                format!("strip-apollonian exact search below curvature {}", plan.max_curvature),
                format!("period extension by 2i, k = 0..={}", plan.k_max),
                "cusp sector at infinity plus its images under g0 and g0^2, plus the incircle".into(),
                format!("g0 = {:?}", MotionRecord::from_motion(&g0::<Rational>()).entries),
            ],
        },
    })
}
