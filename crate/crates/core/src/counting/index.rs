//! Uniform grid over circle bounding boxes.

use super::Bounds;
use crate::mobius::Circle;

/// Buckets circles by the grid cells their bounding boxes touch. Lines and
/// circles spanning many cells go to an overflow list that every query
/// returns.
#[derive(Clone, Debug)]
pub struct GridIndex {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
    overflow: Vec<u32>,
    len: usize,
}

const MAX_SPAN: usize = 4;

impl GridIndex {
    pub fn build(circles: &[Circle<f64>]) -> GridIndex {
        let boxes: Vec<Option<Bounds>> = circles
            .iter()
            .map(|c| {
                let z = c.center()?;
                let r = c.radius()?;
                Some(Bounds::new(z.re - r, z.im - r, z.re + r, z.im + r))
            })
            .collect();
        let total = boxes
            .iter()
            .flatten()
            .fold(Bounds::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |a, b| a.union(b));
        let n = boxes.iter().flatten().count().max(1);
        let (w, h) = if total.is_empty() { (1.0, 1.0) } else { (total.x1 - total.x0, total.y1 - total.y0) };
        let cell = ((w * h / n as f64).sqrt() * 2.0).max(1e-6).max(w.max(h) / 4096.0);
        let nx = ((w / cell).ceil() as usize).max(1);
        let ny = ((h / cell).ceil() as usize).max(1);
        let mut index = GridIndex {
            x0: if total.is_empty() { 0.0 } else { total.x0 },
            y0: if total.is_empty() { 0.0 } else { total.y0 },
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
            overflow: Vec::new(),
            len: circles.len(),
        };
        for (i, b) in boxes.iter().enumerate() {
            match b {
                Some(b) => {
                    let (ix0, iy0, ix1, iy1) = index.cell_range(b);
                    if ix1 - ix0 >= MAX_SPAN || iy1 - iy0 >= MAX_SPAN {
                        index.overflow.push(i as u32);
                    } else {
                        for iy in iy0..=iy1 {
                            for ix in ix0..=ix1 {
                                index.cells[iy * nx + ix].push(i as u32);
                            }
                        }
                    }
                }
                None => index.overflow.push(i as u32),
            }
        }
        index
    }

    fn cell_range(&self, b: &Bounds) -> (usize, usize, usize, usize) {
        let clamp = |v: f64, n: usize| -> usize {
            if v.is_nan() || v <= 0.0 {
                0
            } else {
                (v as usize).min(n - 1)
            }
        };
        (
            clamp((b.x0 - self.x0) / self.cell, self.nx),
            clamp((b.y0 - self.y0) / self.cell, self.ny),
            clamp((b.x1 - self.x0) / self.cell, self.nx),
            clamp((b.y1 - self.y0) / self.cell, self.ny),
        )
    }

    /// Indices of circles whose bounding box may meet `b`, ascending.
    pub fn candidates(&self, b: &Bounds) -> Vec<usize> {
        if !b.is_finite() {
            return (0..self.len).collect();
        }
        if b.is_empty() {
            return Vec::new();
        }
        let (ix0, iy0, ix1, iy1) = self.cell_range(b);
        let mut out: Vec<usize> = self.overflow.iter().map(|&i| i as usize).collect();
        for iy in iy0..=iy1 {
            for ix in ix0..=ix1 {
                out.extend(self.cells[iy * self.nx + ix].iter().map(|&i| i as usize));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}
