//! Counts near the three cusps of the ideal triangle.
//!
//! Near `∞` the strip packing is periodic, so its circles are a finite strip
//! enumeration translated upward. The cusps at `±1` are moved to `∞` by
//! `g0^∓1`, which preserves the packing and hyperbolic area:
//! `g0^-1` maps `{|w − 1| ≤ ρ}` onto `{|z + 1| ≥ 4/ρ}` and `g0` maps
//! `{|w + 1| ≤ ρ}` onto `{|z − 1| ≥ 4/ρ}`.

use super::count::{check_ladder, disk_ratio};
use crate::error::{Error, Result};
use crate::mobius::{beta, hyperbolic_area, hyperbolic_center, Rational, Scalar};
use crate::packing::{enumerate_orbit, period_extend, strip_apollonian_spec, CircleSet, EnumConfig};
use crate::counting::Region;

/// Strip curvature cutoff and number of period translates a cusp count needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuspPlan {
    pub max_curvature: i64,
    pub k_max: i64,
}

/// Lowest center height of a strip circle (radius ≤ 1, `|Re z| ≤ 1`) that
/// meets `{|z − a| ≥ R}` for real `a`: `√((R − 1)² − a²)`.
fn min_height(a: f64, radius: f64) -> Option<f64> {
    let h2 = (radius - 1.0).powi(2) - a * a;
    (radius - 1.0 > a.abs() && h2 > 0.0).then(|| h2.sqrt())
}

/// Outside-disk regions whose counts make up the three cusp counters.
fn cusp_regions(t: f64, eta: f64) -> [(f64, f64); 3] {
    let big = t.powf(-eta);
    [(0.0, big), (-1.0, 4.0 * big), (1.0, 4.0 * big)]
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 0.25 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eta must lie in (0, 1/4), got {eta}")))
    }
}

/// A disk with `r/y > β` meeting `{|z − a| ≥ R}` has `y ≥ y_min(a, R)`, so
/// `r > β·y_min`, and `y < 1/β`. Both bounds must be inside the extension.
fn requirement(a: f64, radius: f64, t: f64) -> Result<(f64, f64)> {
    let b = beta(t)?;
    let y = min_height(a, radius)
        .ok_or_else(|| Error::InvalidArgument(format!("cusp radius {radius} too small around {a}")))?;
    Ok((1.0 / (b * y), 1.0 / b))
}

pub fn cusp_plan(t_ladder: &[f64], eta: f64) -> Result<CuspPlan> {
    check_ladder(t_ladder, "t")?;
    check_eta(eta)?;
    let (mut curv, mut height) = (0.0f64, 0.0f64);
    for &t in t_ladder {
        for (a, r) in cusp_regions(t, eta) {
            let (c, h) = requirement(a, r, t)?;
            curv = curv.max(c);
            height = height.max(h);
        }
    }
    Ok(CuspPlan { max_curvature: curv.ceil() as i64 + 1, k_max: (height / 2.0).ceil() as i64 })
}

/// Disks of the strip packing in the upper half-plane, from an exact search
/// below `plan.max_curvature` extended by `plan.k_max` periods.
pub fn strip_cusp_set(plan: CuspPlan) -> Result<CircleSet<Rational>> {
    let spec = strip_apollonian_spec::<Rational>()?;
    let base = enumerate_orbit(&spec, &EnumConfig::new(plan.max_curvature as f64, Region::rect(-1.0, 0.0, 1.0, 2.0)?))?;
    if !base.provenance.complete {
        return Err(Error::Incomplete("strip search did not finish".into()));
    }
    let mut set = period_extend(&base, plan.k_max)?;
    set.circles.retain(|c| disk_ratio(c).is_some());
    set.provenance.derivations.push("kept disks in the upper half-plane".into());
    Ok(set)
}

fn count_outside<S: Scalar>(set: &CircleSet<S>, a: f64, radius: f64, t: f64) -> Result<u64> {
    let p = &set.provenance;
    let (need_curv, need_height) = requirement(a, radius, t)?;
    let (Some(max), Some(k)) = (p.max_curvature, p.period_blocks) else {
        return Err(Error::Incomplete("cusp counts need a period-extended strip set".into()));
    };
    if p.packing != "strip-apollonian" {
        return Err(Error::Unsupported(format!("cusp counts on {}", p.packing)));
    }
    if need_curv > max || need_height > 2.0 * (k as f64 + 1.0) {
        return Err(Error::Incomplete(format!(
            "t = {t}: need curvature {need_curv:.1} and height {need_height:.1}, set has {max} and {} periods",
            k
        )));
    }
    let b = beta(t)?;
    let count = set
        .circles
        .iter()
        .filter(|c| {
            disk_ratio(*c).is_some_and(|r| r > b) && {
                let f = c.to_float();
                let z = f.center().expect("disk");
                (z - num_complex::Complex64::new(a, 0.0)).norm() + f.radius().expect("disk") >= radius
            }
        })
        .count();
    Ok(count as u64)
}

/// Circles of the strip packing meeting `{|z| ≥ t^−η}` with hyperbolic area `> t`.
pub fn cusp_count_inf<S: Scalar>(set: &CircleSet<S>, t: f64, eta: f64) -> Result<u64> {
    check_eta(eta)?;
    let [(a, r), _, _] = cusp_regions(t, eta);
    count_outside(set, a, r, t)
}

/// Circles meeting `{|z − sign| ≤ t^η}` with hyperbolic area `> t`, counted
/// on their images under `g0^−sign`.
pub fn cusp_count_pm1<S: Scalar>(set: &CircleSet<S>, t: f64, eta: f64, sign: i8) -> Result<u64> {
    check_eta(eta)?;
    let [_, minus, plus] = cusp_regions(t, eta);
    let (a, r) = match sign {
        1 => minus,
        -1 => plus,
        _ => return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}"))),
    };
    count_outside(set, a, r, t)
}

/// `n(P, t)`: disks of the triangle packing with area `> t` whose hyperbolic
/// center lies outside the truncated triangle `t^η ≤ Im z ≤ t^−η`.
pub fn cusp_excess<S: Scalar>(set: &CircleSet<S>, t: f64, eta: f64) -> Result<u64> {
    check_eta(eta)?;
    let floor = set
        .provenance
        .area_floor
        .ok_or_else(|| Error::Incomplete("set carries no hyperbolic-area floor".into()))?;
    if t < floor {
        return Err(Error::Incomplete(format!("t = {t} is below the area floor {floor}")));
    }
    let (lo, hi) = (t.powf(eta), t.powf(-eta));
    let mut n = 0;
    for c in &set.circles {
        let f = c.to_float();
        if disk_ratio(c).is_none() || hyperbolic_area(&f)? <= t {
            continue;
        }
        let h = hyperbolic_center(&f)?;
        if h.im < lo || h.im > hi {
            n += 1;
        }
    }
    Ok(n)
}
