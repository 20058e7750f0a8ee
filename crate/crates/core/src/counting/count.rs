//! Curvature, hemisphere and hyperbolic-area counts over a circle set.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::GridIndex;
use super::region::{circle_meets_region, Bounds, Region};
use crate::error::{Error, Result};
use crate::mobius::{beta, Circle, Scalar};
use crate::packing::CircleSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMetadata {
    /// `curvature`, `geodesic`, `hyparea`, `cusp_inf`, ...
    pub quantity: String,
    pub region: Option<String>,
    pub packing: String,
    /// Digest of the configuration that produced the series (set by callers).
    pub digest: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    /// `T` for curvature ladders, `t` for area ladders.
    pub param: String,
    pub ladder: Vec<f64>,
    pub counts: Vec<u64>,
    pub metadata: SeriesMetadata,
}

impl CountSeries {
    pub fn points(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.ladder.iter().cloned().zip(self.counts.iter().cloned())
    }
}

pub(crate) fn check_ladder(ladder: &[f64], name: &str) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument(format!("empty {name} ladder")));
    }
    if ladder.iter().any(|v| !(v.is_finite() && *v > 0.0)) || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("{name} ladder must be positive and increasing: {ladder:?}")));
    }
    Ok(())
}

/// Refuses unless every circle of the packing with curvature below `cutoff`
/// that touches `region` is in the set: the set must be complete, its cutoff
/// must reach `cutoff` (strictly above it when `inclusive`), and the part of
/// the region inside the packing's support must lie in the window.
pub(crate) fn require_coverage<S: Scalar>(set: &CircleSet<S>, region: &Region, cutoff: f64, inclusive: bool) -> Result<()> {
    let p = &set.provenance;
    if !p.complete {
        return Err(Error::Incomplete(format!("{} set is not complete ({:?})", p.packing, p.stop_reason)));
    }
    let max = p.max_curvature.ok_or_else(|| Error::Incomplete("set has no curvature cutoff".into()))?;
    if cutoff > max || (inclusive && cutoff >= max) {
        return Err(Error::Incomplete(format!("requested curvature {cutoff} but the set stops at {max}")));
    }
    let support = p
        .support
        .as_ref()
        .map(|s| s.clipped_bounds(&Bounds::everything()))
        .unwrap_or_else(Bounds::everything);
    let needed = region.clipped_bounds(&support);
    if needed.is_empty() || *region == p.window {
        return Ok(());
    }
    let covered = match &p.window {
        Region::Rect { x0, y0, x1, y1 } => {
            let slack = 1e-12;
            Bounds::new(x0 - slack, y0 - slack, x1 + slack, y1 + slack).contains_bounds(&needed)
        }
        _ => false,
    };
    if covered {
        Ok(())
    } else {
        Err(Error::Incomplete(format!(
            "region {region} (within the support: {needed:?}) is not covered by the window {}",
            p.window
        )))
    }
}

fn float_circles<S: Scalar>(set: &CircleSet<S>) -> Vec<Circle<f64>> {
    set.circles.iter().map(Circle::to_float).collect()
}

fn metadata<S>(set: &CircleSet<S>, quantity: &str, region: Option<&Region>) -> SeriesMetadata {
    SeriesMetadata {
        quantity: quantity.into(),
        region: region.map(|r| r.to_string()),
        packing: set.provenance.packing.clone(),
        digest: None,
    }
}

/// Candidate indices for a region: grid lookup for bounded regions.
fn candidates(circles: &[Circle<f64>], region: &Region, grow: f64) -> Vec<usize> {
    match region.bounds() {
        Some(b) => GridIndex::build(circles).candidates(&b.expand(grow)),
        None => (0..circles.len()).collect(),
    }
}

/// `N_T(E)`: circles with curvature `< T` meeting `E`, for each `T`.
pub fn count_curvature<S: Scalar>(set: &CircleSet<S>, region: &Region, ladder: &[f64]) -> Result<CountSeries> {
    check_ladder(ladder, "T")?;
    require_coverage(set, region, *ladder.last().expect("nonempty"), false)?;
    let circles = float_circles(set);
    let cand = candidates(&circles, region, 0.0);
    let mut curv: Vec<f64> = cand
        .par_iter()
        .filter(|&&i| circle_meets_region(&circles[i], region))
        .map(|&i| set.circles[i].curvature().to_f64())
        .collect();
    curv.sort_by(f64::total_cmp);
    let counts = ladder.iter().map(|&t| curv.partition_point(|&c| c < t) as u64).collect();
    Ok(CountSeries { param: "T".into(), ladder: ladder.to_vec(), counts, metadata: metadata(set, "curvature", Some(region)) })
}

/// Whether the region meets the closed annulus `r0 ≤ |p − z| ≤ r1`, from
/// the range of distances to `z` (connected pieces only).
fn meets_annulus(region: &Region, z: Complex64, r0: f64, r1: f64) -> Result<bool> {
    let tol = 1e-12 * (1.0 + z.norm() + r1);
    match region {
        Region::Union { parts } => {
            for p in parts {
                if meets_annulus(p, z, r0, r1)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => {
            let (lo, hi) = region
                .distance_range(z)
                .ok_or_else(|| Error::Unsupported(format!("hemisphere test against {region}")))?;
            Ok(lo <= r1 + tol && hi + tol >= r0)
        }
    }
}

/// True iff the geodesic plane over `circle` meets `{z + l·j : z ∈ E, 1/T ≤ l ≤ 1}`.
pub fn hemisphere_meets_box(circle: &Circle<f64>, region: &Region, t: f64) -> Result<bool> {
    if !(t > 1.0) {
        return Err(Error::InvalidArgument(format!("hemisphere test needs T > 1, got {t}")));
    }
    match (circle.center(), circle.radius()) {
        (Some(z), Some(r)) => {
            let floor = 1.0 / t;
            if r < floor {
                return Ok(false);
            }
            let r0 = (r * r - 1.0).max(0.0).sqrt();
            let r1 = ((r - floor) * (r + floor)).max(0.0).sqrt();
            meets_annulus(region, z, r0, r1)
        }
        _ => Ok(circle_meets_region(circle, region)),
    }
}

/// Circles whose geodesic plane meets the box over `E` between heights
/// `1/T` and `1`, for each `T`.
///
/// Every such circle has curvature at most `T`, and its disk meets `E`.
/// Packing disks are no larger than the window, so a disk meeting the window
/// has its boundary meeting it too. The coverage rule of
/// [`count_curvature`] therefore applies, with the cutoff strictly above `T`.
pub fn count_geodesic<S: Scalar>(set: &CircleSet<S>, region: &Region, ladder: &[f64]) -> Result<CountSeries> {
    check_ladder(ladder, "T")?;
    if ladder[0] <= 1.0 {
        return Err(Error::InvalidArgument("geodesic counts need T > 1".into()));
    }
    require_coverage(set, region, *ladder.last().expect("nonempty"), true)?;
    let circles = float_circles(set);
    let cand = candidates(&circles, region, 0.0);
    let hits: Vec<Vec<bool>> = cand
        .par_iter()
        .map(|&i| ladder.iter().map(|&t| hemisphere_meets_box(&circles[i], region, t)).collect::<Result<Vec<bool>>>())
        .collect::<Result<_>>()?;
    let counts = (0..ladder.len()).map(|k| hits.iter().filter(|h| h[k]).count() as u64).collect();
    Ok(CountSeries { param: "T".into(), ladder: ladder.to_vec(), counts, metadata: metadata(set, "geodesic", Some(region)) })
}

/// Euclidean radius over center height, `r/y = 1/wy`. `None` unless the
/// disk lies in the open upper half-plane.
pub fn disk_ratio<S: Scalar>(c: &Circle<S>) -> Option<f64> {
    if c.is_line() || *c.wy() <= S::one() {
        return None;
    }
    Some(1.0 / c.wy().to_f64())
}

/// `N_t`: disks with hyperbolic area `> t`, for each `t`, through the
/// equivalent test `r/y > β(t)`.
pub fn count_hyparea<S: Scalar>(set: &CircleSet<S>, t_ladder: &[f64]) -> Result<CountSeries> {
    check_ladder(t_ladder, "t")?;
    let floor = set
        .provenance
        .area_floor
        .ok_or_else(|| Error::Incomplete("set carries no hyperbolic-area floor".into()))?;
    if t_ladder[0] < floor {
        return Err(Error::Incomplete(format!(
            "smallest t = {} is below the area floor {floor} of the set",
            t_ladder[0]
        )));
    }
    let mut ratios: Vec<f64> = set.circles.iter().filter_map(disk_ratio).collect();
    ratios.sort_by(|a, b| b.total_cmp(a));
    let counts = t_ladder
        .iter()
        .map(|&t| beta(t).map(|b| ratios.partition_point(|&r| r > b) as u64))
        .collect::<Result<_>>()?;
    Ok(CountSeries { param: "t".into(), ladder: t_ladder.to_vec(), counts, metadata: metadata(set, "hyparea", None) })
}
