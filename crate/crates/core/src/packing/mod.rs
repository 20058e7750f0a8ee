//! Packing specifications, orbit enumeration and derived packings.

mod descartes;
mod enumerate;
mod strip;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::counting::Region;
use crate::error::{Error, Result};
use crate::mobius::{Circle, Motion, Scalar};

pub use descartes::{descartes_validate, DescartesReport};
pub use enumerate::{enumerate_orbit, EnumConfig};
pub use strip::{
    d_infinity_sector, g0, ideal_triangle_filter, ideal_triangle_packing, in_ideal_triangle, period_extend,
    strip_apollonian_spec, triangle_floor, TrianglePlan,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn of<S: Scalar>() -> Backend {
        if S::EXACT {
            Backend::Exact
        } else {
            Backend::Float
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

/// Seeds plus generating motions. The packing is the orbit of the seeds.
#[derive(Clone, Debug)]
pub struct PackingSpec<S> {
    pub name: String,
    pub seeds: Vec<Circle<S>>,
    pub generators: Vec<Motion<S>>,
    /// A motion preserving the packing, when one is known.
    pub period: Option<Motion<S>>,
    /// Curvature never decreases from a circle to a newly found child. When
    /// set, the curvature cutoff is a valid pruning rule and runs that finish
    /// are complete.
    pub monotone: bool,
    /// A closed set containing every circle of the packing.
    pub support: Option<Region>,
}

impl<S: Scalar> PackingSpec<S> {
    pub fn backend(&self) -> Backend {
        Backend::of::<S>()
    }

    /// Largest seed diameter; lines count as zero.
    pub fn max_seed_diameter(&self) -> f64 {
        self.seeds
            .iter()
            .filter_map(|c| c.radius())
            .fold(0.0, |acc, r| acc.max(2.0 * r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Exhausted,
    WordLength,
    CircleBudget,
    /// The set was assembled from other sets rather than by one search.
    Derived,
}

/// A motion in text form, entries in the backend's number format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionRecord {
    /// `a.re, a.im, b.re, b.im, c.re, c.im, d.re, d.im`.
    pub entries: Vec<String>,
    pub conj: bool,
}

impl MotionRecord {
    pub fn from_motion<S: Scalar>(g: &Motion<S>) -> Self {
        let m = g.matrix();
        let entries = m
            .iter()
            .flat_map(|row| row.iter())
            .flat_map(|z| [z.re.format(), z.im.format()])
            .collect();
        Self { entries, conj: g.is_anti() }
    }

    pub fn to_motion<S: Scalar>(&self) -> Result<Motion<S>> {
        if self.entries.len() != 8 {
            return Err(Error::Parse(format!("motion needs 8 entries, got {}", self.entries.len())));
        }
        let v = self.entries.iter().map(|s| S::parse(s)).collect::<Result<Vec<S>>>()?;
        let z = |i: usize| Complex::new(v[2 * i].clone(), v[2 * i + 1].clone());
        Motion::new([[z(0), z(1)], [z(2), z(3)]], self.conj)
    }
}

/// How a circle set was produced and what it can answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub packing: String,
    pub backend: Backend,
    /// Curvature cutoff (strict); absent for sets bounded by an area floor.
    pub max_curvature: Option<f64>,
    /// Every circle of the packing meeting this region and below the cutoff
    /// is present when `complete` holds.
    pub window: Region,
    pub support: Option<Region>,
    pub complete: bool,
    pub stop_reason: StopReason,
    pub levels: usize,
    /// Circles kept by the search, including those outside the window.
    pub generated: usize,
    /// Every circle with hyperbolic area above this value is present.
    pub area_floor: Option<f64>,
    pub period: Option<MotionRecord>,
    /// For period-extended sets: translates `0..=period_blocks` of the base
    /// block are present.
    pub period_blocks: Option<i64>,
    /// Free-form notes on how the set was derived.
    pub derivations: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CircleSet<S> {
    pub circles: Vec<Circle<S>>,
    pub provenance: Provenance,
}

impl<S: Scalar> CircleSet<S> {
    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn to_float(&self) -> CircleSet<f64> {
        let mut provenance = self.provenance.clone();
        provenance.backend = Backend::Float;
        CircleSet { circles: self.circles.iter().map(Circle::to_float).collect(), provenance }
    }

    pub fn sort_canonical(&mut self) {
        self.circles.sort_by(|a, b| a.canonical_cmp(b));
    }
}
