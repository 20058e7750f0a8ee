//! Boundary-collar decay, a proxy for the regularity exponent.
//!
//! The measure of `dilate(E, ε) ∖ erode(E, ε)` is approximated by the share of
//! circles in a fixed curvature band that meet the collar.

use serde::{Deserialize, Serialize};

use super::fit::{ols, PowerFit};
use crate::counting::{circle_meets_region, require_coverage, Region};
use crate::error::{Error, Result};
use crate::mobius::{Circle, Scalar};
use crate::packing::CircleSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollarCount {
    pub eps: f64,
    pub count: u64,
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    /// No reference circle meets any collar.
    TriviallyRegular { collars: Vec<CollarCount> },
    Fitted { fit: PowerFit, collars: Vec<CollarCount> },
}

impl ProbeOutcome {
    pub fn collars(&self) -> &[CollarCount] {
        match self {
            ProbeOutcome::TriviallyRegular { collars } | ProbeOutcome::Fitted { collars, .. } => collars,
        }
    }
}

pub fn collar(region: &Region, eps: f64) -> Result<Region> {
    Ok(Region::Minus { bound: Box::new(region.dilate(eps)?), hole: Box::new(region.erode(eps)?) })
}

/// Reference band `[T/4, T)` below the enumeration cutoff `T`.
pub fn regularity_probe<S: Scalar>(set: &CircleSet<S>, region: &Region, eps_ladder: &[f64]) -> Result<ProbeOutcome> {
    let mut ladder = eps_ladder.to_vec();
    ladder.sort_by(f64::total_cmp);
    ladder.dedup();
    if ladder.len() < 4 || ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "probe needs at least 4 distinct positive scales, got {eps_ladder:?}"
        )));
    }
    if !region.is_bounded() {
        return Err(Error::InvalidArgument(format!("probe region {region} is unbounded")));
    }
    let top = set.provenance.max_curvature.ok_or_else(|| Error::Incomplete("set has no curvature cutoff".into()))?;
    let widest = region.dilate(*ladder.last().expect("nonempty"))?;
    require_coverage(set, &widest, top, false)?;
    let band: Vec<Circle<f64>> = set
        .circles
        .iter()
        .map(|c| c.to_float())
        .filter(|c| {
            let k = c.curvature();
            k >= top / 4.0 && k < top
        })
        .collect();
    if band.is_empty() {
        return Err(Error::InsufficientData("reference band is empty".into()));
    }
    let mut collars = Vec::with_capacity(ladder.len());
    for &eps in &ladder {
        let shell = collar(region, eps)?;
        let count = band.iter().filter(|c| circle_meets_region(c, &shell)).count() as u64;
        collars.push(CollarCount { eps, count, share: count as f64 / band.len() as f64 });
    }
    if collars.iter().all(|c| c.count == 0) {
        return Ok(ProbeOutcome::TriviallyRegular { collars });
    }
    let used: Vec<&CollarCount> = collars.iter().filter(|c| c.count > 0).collect();
    if used.len() < 4 {
        return Err(Error::InsufficientData(format!("{} scales with a nonzero collar count", used.len())));
    }
    let x: Vec<f64> = used.iter().map(|c| c.eps.ln()).collect();
    let y: Vec<f64> = used.iter().map(|c| c.share.ln()).collect();
    let (slope, intercept, r2, stderr) = ols(&x, &y)?;
    let fit = PowerFit {
        exponent: slope,
        log_coeff: intercept,
        r_squared: r2,
        stderr_exponent: stderr,
        window: (used[0].eps, used[used.len() - 1].eps),
        n_points: used.len(),
    };
    Ok(ProbeOutcome::Fitted { fit, collars })
}
