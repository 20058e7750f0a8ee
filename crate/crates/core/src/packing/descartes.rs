//! Descartes-identity check on tangent quadruples of a circle set.

use hashbrown::HashMap;
use rustc_hash::FxBuildHasher;

use super::CircleSet;
use crate::mobius::{Circle, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct DescartesReport {
    pub quadruples: usize,
    /// Largest `|(Σb)² − 2Σb²|`, relative to `Σb²` (zero on the exact backend).
    pub max_residual: f64,
}

fn tangent<S: Scalar>(a: &Circle<S>, b: &Circle<S>) -> bool {
    let p = a.inversive_product(b) + S::one();
    if S::EXACT {
        p.is_zero_exact()
    } else {
        p.abs_val().to_f64() <= 1e-7 * (1.0 + a.b().to_f64() + b.b().to_f64())
    }
}

/// Finds quadruples of mutually tangent circles among those with curvature
/// below `max_curvature` and checks the Descartes relation on each.
pub fn descartes_validate<S: Scalar>(set: &CircleSet<S>, max_curvature: f64) -> DescartesReport {
    let circles: Vec<&Circle<S>> = set.circles.iter().filter(|c| c.curvature().to_f64() < max_curvature).collect();
    let n = circles.len();

    // Neighbor search: disks bucketed by a grid with cell 2 (the largest
    // diameter). Tangent disks have centers within r1 + r2 ≤ 2 of each other.
    let cell = 2.0;
    let mut grid: HashMap<(i64, i64), Vec<usize>, FxBuildHasher> = HashMap::with_hasher(FxBuildHasher);
    let mut lines = Vec::new();
    for (i, c) in circles.iter().enumerate() {
        match c.center() {
            Some(z) => grid.entry(((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)).or_default().push(i),
            None => lines.push(i),
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in circles.iter().enumerate() {
        let cand: Vec<usize> = match c.center() {
            Some(z) => {
                let (gx, gy) = ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
                let mut v: Vec<usize> = lines.clone();
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(b) = grid.get(&(gx + dx, gy + dy)) {
                            v.extend_from_slice(b);
                        }
                    }
                }
                v
            }
            None => (0..n).collect(),
        };
        for j in cand {
            if j > i && tangent(c, circles[j]) {
                adj[i].push(j);
            }
        }
    }
    for v in adj.iter_mut() {
        v.sort_unstable();
    }
    let is_adj = |i: usize, j: usize| {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        adj[lo].binary_search(&hi).is_ok()
    };

    let mut quadruples = 0;
    let mut max_residual = 0.0f64;
    for a in 0..n {
        for (x, &b) in adj[a].iter().enumerate() {
            for (y, &c) in adj[a].iter().enumerate().skip(x + 1) {
                if !is_adj(b, c) {
                    continue;
                }
                for &d in adj[a].iter().skip(y + 1) {
                    if is_adj(b, d) && is_adj(c, d) {
                        let k = [a, b, c, d].map(|i| circles[i].curvature());
                        let sum = k.iter().cloned().fold(S::zero(), |acc, v| acc + v);
                        let sq = k.iter().cloned().fold(S::zero(), |acc, v| acc + v.clone() * v);
                        let two = S::one() + S::one();
                        let resid = (sum.clone() * sum - two * sq.clone()).abs_val().to_f64();
                        max_residual = max_residual.max(resid / sq.to_f64().max(1.0));
                        quadruples += 1;
                    }
                }
            }
        }
    }
    DescartesReport { quadruples, max_residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Region;
    use crate::mobius::Rational;
    use crate::packing::{enumerate_orbit, strip_apollonian_spec, EnumConfig};

    #[test]
    fn strip_quadruples_satisfy_descartes() {
        let spec = strip_apollonian_spec::<Rational>().unwrap();
        let set = enumerate_orbit(&spec, &EnumConfig::new(300.0, Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap())).unwrap();
        let report = descartes_validate(&set, 300.0);
        assert!(report.quadruples > 20, "{report:?}");
        assert_eq!(report.max_residual, 0.0);
        let float = descartes_validate(&set.to_float(), 300.0);
        assert_eq!(float.quadruples, report.quadruples);
        assert!(float.max_residual < 1e-9);
    }
}
