//! Level-synchronous breadth-first search over generator words.

use hashbrown::HashSet;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;

use super::{Backend, CircleSet, MotionRecord, PackingSpec, Provenance, StopReason};
use num_complex::Complex64;

use crate::counting::{circle_meets_region, Bounds, Region};
use crate::error::{Error, Result};
use crate::mobius::{Circle, LorentzMap, Scalar};

#[derive(Clone, Debug)]
pub struct EnumConfig {
    /// Circles with curvature at or above this are pruned.
    pub max_curvature: f64,
    /// Bounded region the output must cover. Branches are pruned against
    /// its bounding box.
    pub window: Region,
    pub max_word_length: Option<usize>,
    /// Float backend only: coordinates are rounded to this grid for dedup.
    pub dedup_quantum: f64,
    pub max_circles: Option<usize>,
}

impl EnumConfig {
    pub fn new(max_curvature: f64, window: Region) -> Self {
        Self { max_curvature, window, max_word_length: None, dedup_quantum: 1e-9, max_circles: None }
    }
}

struct Seen<K> {
    set: HashSet<K, FxBuildHasher>,
}

impl<K: std::hash::Hash + Eq + Clone> Seen<K> {
    /// Inserts the primary key unless it or any alternate is present.
    fn insert(&mut self, primary: K, alternates: Vec<K>) -> bool {
        if self.set.contains(&primary) || alternates.iter().any(|k| self.set.contains(k)) {
            return false;
        }
        self.set.insert(primary);
        true
    }
}

struct Node<S> {
    /// Accumulated word, applied to the seeds.
    g: LorentzMap<S>,
    last: Option<usize>,
    curvature: f64,
}

struct Candidate<S> {
    node: Node<S>,
    images: Vec<Circle<S>>,
    parent_curvature: f64,
}

/// Whether the closed side of `mirror` containing the circle `inside` can
/// meet `bounds`. Conservative: `true` when unsure.
fn side_meets(mirror: &Circle<f64>, inside: &Circle<f64>, bounds: &Bounds) -> bool {
    let probe = inside.center().unwrap_or_else(|| inside.point_at(0.0));
    let corners = [
        Complex64::new(bounds.x0, bounds.y0),
        Complex64::new(bounds.x0, bounds.y1),
        Complex64::new(bounds.x1, bounds.y0),
        Complex64::new(bounds.x1, bounds.y1),
    ];
    let scale = 1.0 + corners.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match (mirror.center(), mirror.radius()) {
        (Some(c), Some(rho)) => {
            if (probe - c).norm() >= rho {
                return true; // complement of a disk
            }
            let dx = (bounds.x0 - c.re).max(c.re - bounds.x1).max(0.0);
            let dy = (bounds.y0 - c.im).max(c.im - bounds.y1).max(0.0);
            dx.hypot(dy) <= rho + 1e-9 * (scale + rho)
        }
        _ => {
            let n = mirror.normal().expect("line");
            let d = mirror.offset().expect("line");
            let sign = if n.re * probe.re + n.im * probe.im <= d { 1.0 } else { -1.0 };
            corners.iter().any(|z| sign * (n.re * z.re + n.im * z.im - d) <= 1e-9 * scale)
        }
    }
}

/// Enumerates the orbit of `spec.seeds` under the group generated by
/// `spec.generators`, keeping circles below the curvature cutoff that meet
/// the window, sorted canonically.
///
/// Words are extended on the right: the node for `g` has children `g·s`, and
/// its new circles are `g·s(seed)` for the seeds `s` moves. For a reflection
/// `s` in a mirror `m`, every descendant of `g·s` lies on the side of `g(m)`
/// containing the node's new circle, so the branch is dropped once that side
/// misses the window. When the packing is declared monotone, curvature cannot decrease
/// along a branch and the cutoff prunes as well; a finished run with the
/// exact backend is then complete.
pub fn enumerate_orbit<S: Scalar>(spec: &PackingSpec<S>, config: &EnumConfig) -> Result<CircleSet<S>> {
    let cutoff_f = config.max_curvature;
    if !(cutoff_f > 0.0 && cutoff_f.is_finite()) {
        return Err(Error::InvalidArgument(format!("max curvature must be positive, got {cutoff_f}")));
    }
    let bounds = config
        .window
        .bounds()
        .ok_or_else(|| Error::InvalidArgument(format!("window {} is unbounded", config.window)))?;
    if !spec.monotone && config.max_word_length.is_none() && config.max_circles.is_none() {
        return Err(Error::InvalidArgument("non-monotone generator sets need a word-length cap".into()));
    }
    let cutoff = S::from_f64(cutoff_f).ok_or_else(|| Error::InvalidArgument("max curvature".into()))?;
    let quantum = config.dedup_quantum;

    let maps: Vec<LorentzMap<S>> = spec.generators.iter().map(|g| g.lorentz()).collect();
    let mirrors: Vec<Option<Circle<S>>> = spec.generators.iter().map(|g| g.mirror()).collect();
    let identity = LorentzMap::identity();
    let involution: Vec<bool> = maps.iter().map(|m| m.compose(m) == identity).collect();
    // Seeds each generator actually moves.
    let moved: Vec<Vec<usize>> = maps
        .iter()
        .map(|m| {
            (0..spec.seeds.len())
                .filter(|&k| !m.apply_circle(&spec.seeds[k]).approx_eq(&spec.seeds[k], 1e-12))
                .collect()
        })
        .collect();

    let mut seen = Seen { set: HashSet::with_hasher(FxBuildHasher) };
    let mut kept: Vec<Circle<S>> = Vec::new();
    for seed in &spec.seeds {
        let (k, alt) = S::dedup_keys(seed.coords(), quantum);
        if seed.curvature() < cutoff && seen.insert(k, alt) {
            kept.push(seed.clone());
        }
    }
    let root_curvature = spec.seeds.iter().map(|c| c.curvature().to_f64()).fold(f64::INFINITY, f64::min);
    let mut frontier = vec![Node { g: identity.clone(), last: None, curvature: root_curvature.min(cutoff_f) }];

    let mut levels = 0usize;
    let mut stop = StopReason::Exhausted;
    'search: while !frontier.is_empty() {
        if config.max_word_length.is_some_and(|w| levels >= w) {
            stop = StopReason::WordLength;
            break;
        }
        let (maps, mirrors, involution, moved) = (&maps, &mirrors, &involution, &moved);
        let (seeds, cutoff, bounds) = (&spec.seeds, &cutoff, &bounds);
        let monotone = spec.monotone;
        let children: Vec<Result<Candidate<S>>> = frontier
            .par_iter()
            .flat_map_iter(|node| {
                maps.iter().enumerate().filter_map(move |(gi, map)| {
                    if (node.last == Some(gi) && involution[gi]) || moved[gi].is_empty() {
                        return None;
                    }
                    let g = node.g.compose(map);
                    let mut images = Vec::with_capacity(moved[gi].len());
                    for &k in &moved[gi] {
                        let v = g.apply(seeds[k].coords());
                        if let Err(e) = S::check_magnitude(&v) {
                            return Some(Err(e));
                        }
                        images.push(Circle::canonical(v));
                    }
                    if monotone && images.iter().all(|c| c.curvature() >= *cutoff) {
                        return None;
                    }
                    if let Some(m) = &mirrors[gi] {
                        let image_mirror = node.g.apply_circle(m).to_float();
                        if !side_meets(&image_mirror, &images[0].to_float(), bounds) {
                            return None;
                        }
                    }
                    Some(Ok(Candidate {
                        node: Node { g, last: Some(gi), curvature: 0.0 },
                        images,
                        parent_curvature: node.curvature,
                    }))
                })
            })
            .collect();

        let mut next = Vec::new();
        for child in children {
            let Candidate { mut node, images, parent_curvature } = child?;
            let mut lowest = f64::INFINITY;
            for circle in images {
                if circle.curvature() >= *cutoff {
                    continue;
                }
                let (k, alt) = S::dedup_keys(circle.coords(), quantum);
                if !seen.insert(k, alt) {
                    continue;
                }
                let curvature = circle.curvature().to_f64();
                if spec.monotone {
                    let slack = if S::EXACT { 0.0 } else { 1e-9 * (1.0 + parent_curvature) };
                    if curvature < parent_curvature - slack {
                        return Err(Error::MonotonicityViolated { parent: parent_curvature, child: curvature });
                    }
                }
                lowest = lowest.min(curvature);
                kept.push(circle);
                if config.max_circles.is_some_and(|m| kept.len() >= m) {
                    stop = StopReason::CircleBudget;
                    levels += 1;
                    break 'search;
                }
            }
            if lowest.is_finite() {
                node.curvature = lowest;
                next.push(node);
            }
        }
        frontier = next;
        levels += 1;
    }

    let generated = kept.len();
    let window = &config.window;
    let mut circles: Vec<Circle<S>> = kept
        .into_par_iter()
        .filter(|c| circle_meets_region(&c.to_float(), window))
        .collect();
    circles.sort_by(|a, b| a.canonical_cmp(b));

    let complete = spec.monotone && S::EXACT && stop == StopReason::Exhausted;
    Ok(CircleSet {
        circles,
        provenance: Provenance {
            packing: spec.name.clone(),
            backend: Backend::of::<S>(),
            max_curvature: Some(cutoff_f),
            window: config.window.clone(),
            support: spec.support.clone(),
            complete,
            stop_reason: stop,
            levels,
            generated,
            area_floor: None,
            period_blocks: None,
            period: spec.period.as_ref().map(MotionRecord::from_motion),
            derivations: vec![format!("orbit search, {} generators", spec.generators.len())],
        },
    })
}
