//! Box-counting dimension of the union of circle curves.

use serde::{Deserialize, Serialize};

use super::fit::{ols, PowerFit};
use crate::counting::Bounds;
use crate::error::{Error, Result};
use crate::mobius::{Circle, Scalar};
use crate::packing::CircleSet;

/// Boxes touched by fewer small circles than this (and by no large one)
/// are rejected by the guard.
const CLUSTER_MIN: u8 = 2;

/// The smallest scale must exceed this many minimal enumerated radii.
const DEPTH_FACTOR: f64 = 8.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCount {
    pub eps: f64,
    pub boxes: u64,
    /// Boxes met only by a lone sub-ε/2 circle, hence not counted.
    pub rejected: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub alpha_hat: f64,
    pub scales: Vec<ScaleCount>,
    pub fit: PowerFit,
    /// Rejected boxes over all touched boxes, pooled across scales.
    pub guard_failure_rate: f64,
}

struct Grid {
    x0: f64,
    y0: f64,
    eps: f64,
    nx: usize,
    ny: usize,
    big: Vec<bool>,
    small: Vec<u8>,
}

impl Grid {
    fn new(b: &Bounds, eps: f64) -> Grid {
        let nx = ((b.x1 - b.x0) / eps - 1e-9).ceil().max(1.0) as usize;
        let ny = ((b.y1 - b.y0) / eps - 1e-9).ceil().max(1.0) as usize;
        Grid { x0: b.x0, y0: b.y0, eps, nx, ny, big: vec![false; nx * ny], small: vec![0; nx * ny] }
    }

    fn rows(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        span(self.y0, self.eps, self.ny, lo, hi)
    }

    /// Marks columns meeting `[lo, hi]` in row `j`, at most once per call.
    fn mark(&mut self, j: usize, lo: f64, hi: f64, large: bool, seen: &mut Vec<usize>) {
        if let Some((a, b)) = span(self.x0, self.eps, self.nx, lo, hi) {
            for i in a..=b {
                let k = j * self.nx + i;
                if large {
                    self.big[k] = true;
                } else if !seen.contains(&k) {
                    seen.push(k);
                    self.small[k] = self.small[k].saturating_add(1);
                }
            }
        }
    }

    fn add(&mut self, c: &Circle<f64>) {
        let mut seen = Vec::new();
        if let (Some(z), Some(r)) = (c.center(), c.radius()) {
            let large = r >= self.eps / 2.0;
            let Some((ja, jb)) = self.rows(z.im - r, z.im + r) else { return };
            for j in ja..=jb {
                let ya = self.y0 + j as f64 * self.eps - z.im;
                let yb = ya + self.eps;
                let (da, db) = (ya.max(-r), yb.min(r));
                if da > db {
                    continue;
                }
                let near = if da <= 0.0 && db >= 0.0 { 0.0 } else { da.abs().min(db.abs()) };
                let far = da.abs().max(db.abs());
                let w_max = (r * r - near * near).max(0.0).sqrt();
                let w_min = (r * r - far * far).max(0.0).sqrt();
                self.mark(j, z.re + w_min, z.re + w_max, large, &mut seen);
                self.mark(j, z.re - w_max, z.re - w_min, large, &mut seen);
            }
        } else if let (Some(n), Some(d)) = (c.normal(), c.offset()) {
            // n.re·x + n.im·y = d
            if n.re.abs() < 1e-12 {
                let y = d / n.im;
                if let Some((ja, jb)) = self.rows(y, y) {
                    for j in ja..=jb {
                        self.mark(j, f64::NEG_INFINITY, f64::INFINITY, true, &mut seen);
                    }
                }
            } else {
                for j in 0..self.ny {
                    let ya = self.y0 + j as f64 * self.eps;
                    let xa = (d - n.im * ya) / n.re;
                    let xb = (d - n.im * (ya + self.eps)) / n.re;
                    self.mark(j, xa.min(xb), xa.max(xb), true, &mut seen);
                }
            }
        }
    }

    fn tally(&self) -> (u64, u64) {
        let mut counted = 0;
        let mut rejected = 0;
        for (b, s) in self.big.iter().zip(&self.small) {
            if *b || *s >= CLUSTER_MIN {
                counted += 1;
            } else if *s > 0 {
                rejected += 1;
            }
        }
        (counted, rejected)
    }
}

/// Indices of the closed cells `[o + kε, o + (k+1)ε]`, `k < n`, meeting `[lo, hi]`.
fn span(o: f64, eps: f64, n: usize, lo: f64, hi: f64) -> Option<(usize, usize)> {
    let a = ((lo - o) / eps).ceil() - 1.0;
    let b = ((hi - o) / eps).floor();
    let a = a.max(0.0);
    let b = b.min(n as f64 - 1.0);
    (a <= b).then_some((a as usize, b as usize))
}

pub fn box_count_dimension<S: Scalar>(set: &CircleSet<S>, scales: &[f64]) -> Result<DimensionEstimate> {
    if scales.len() < 4 {
        return Err(Error::InsufficientData(format!("{} scales, need at least 4", scales.len())));
    }
    if scales.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidArgument("scales must be positive".into()));
    }
    let bounds = set
        .provenance
        .window
        .bounds()
        .filter(|b| b.is_finite() && !b.is_empty())
        .ok_or_else(|| Error::InvalidArgument("box counting needs a bounded window".into()))?;
    let eps_min = scales.iter().copied().fold(f64::INFINITY, f64::min);
    let depth = set.provenance.max_curvature.unwrap_or(f64::INFINITY);
    if !set.provenance.complete || depth * eps_min < DEPTH_FACTOR {
        return Err(Error::Incomplete(format!(
            "smallest scale {eps_min} needs a complete enumeration to curvature {}",
            DEPTH_FACTOR / eps_min
        )));
    }
    let circles: Vec<Circle<f64>> = set.circles.iter().map(|c| c.to_float()).collect();
    let mut out = Vec::with_capacity(scales.len());
    let (mut touched, mut failed) = (0u64, 0u64);
    for &eps in scales {
        let mut grid = Grid::new(&bounds, eps);
        for c in &circles {
            grid.add(c);
        }
        let (boxes, rejected) = grid.tally();
        touched += boxes + rejected;
        failed += rejected;
        if boxes == 0 {
            return Err(Error::InsufficientData(format!("no boxes counted at ε = {eps}")));
        }
        out.push(ScaleCount { eps, boxes, rejected });
    }
    let x: Vec<f64> = out.iter().map(|s| -s.eps.ln()).collect();
    let y: Vec<f64> = out.iter().map(|s| (s.boxes as f64).ln()).collect();
    let (slope, intercept, r2, stderr) = ols(&x, &y)?;
    let fit = PowerFit {
        exponent: slope,
        log_coeff: intercept,
        r_squared: r2,
        stderr_exponent: stderr,
        window: (eps_min, scales.iter().copied().fold(0.0, f64::max)),
        n_points: out.len(),
    };
    let guard_failure_rate = if touched == 0 { 0.0 } else { failed as f64 / touched as f64 };
    Ok(DimensionEstimate { alpha_hat: slope, scales: out, fit, guard_failure_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Region;
    use crate::mobius::circle_from_center_radius;
    use crate::packing::{Backend, Provenance, StopReason};
    use num_complex::Complex64;

    fn synthetic(circles: Vec<Circle<f64>>, window: Region, depth: f64) -> CircleSet<f64> {
        let provenance = Provenance {
            packing: "synthetic".into(),
            backend: Backend::Float,
            max_curvature: Some(depth),
            window: window.clone(),
            support: None,
            complete: true,
            stop_reason: StopReason::Exhausted,
            levels: 0,
            generated: circles.len(),
            area_floor: None,
            period: None,
            period_blocks: None,
            derivations: vec![],
        };
        CircleSet { circles, provenance }
    }

    fn scales() -> Vec<f64> {
        (4..=9).map(|k| 2f64.powi(-k)).collect()
    }

    #[test]
    fn segment_has_dimension_one() {
        let line = Circle::line(0.8, 0.6, 0.1).unwrap();
        let set = synthetic(vec![line], Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap(), 1e6);
        let d = box_count_dimension(&set, &scales()).unwrap();
        assert!((d.alpha_hat - 1.0).abs() < 0.05, "{d:?}");
        let flat = Circle::line(0.0, 1.0, 0.7).unwrap();
        let set = synthetic(vec![flat], Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap(), 1e6);
        assert!((box_count_dimension(&set, &scales()).unwrap().alpha_hat - 1.0).abs() < 0.05);
    }

    #[test]
    fn dense_dust_has_dimension_two() {
        let h = 2f64.powi(-11);
        let mut circles = Vec::new();
        for i in 0..(1 << 10) {
            for j in 0..(1 << 10) {
                let z = Complex64::new((2 * i + 1) as f64 * h, (2 * j + 1) as f64 * h);
                circles.push(circle_from_center_radius(z, h / 2.0).unwrap());
            }
        }
        let set = synthetic(circles, Region::rect(0.0, 0.0, 1.0, 1.0).unwrap(), 4.0 / h);
        let d = box_count_dimension(&set, &scales()).unwrap();
        assert!((d.alpha_hat - 2.0).abs() < 0.05, "{d:?}");
    }

    #[test]
    fn lone_small_circles_are_rejected() {
        let c = circle_from_center_radius(Complex64::new(0.5 + 2f64.powi(-11), 0.5 + 2f64.powi(-11)), 2f64.powi(-13)).unwrap();
        let line = Circle::line(1.0, 0.0, 0.25).unwrap();
        let set = synthetic(vec![c, line], Region::rect(0.0, 0.0, 1.0, 1.0).unwrap(), 1e6);
        let d = box_count_dimension(&set, &scales()).unwrap();
        assert!(d.scales.iter().all(|s| s.rejected == 1));
        assert!(d.guard_failure_rate > 0.0);
    }

    #[test]
    fn shallow_enumeration_is_refused() {
        let line = Circle::line(1.0, 0.0, 0.0).unwrap();
        let set = synthetic(vec![line], Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap(), 100.0);
        assert!(matches!(box_count_dimension(&set, &scales()), Err(Error::Incomplete(_))));
    }
}
