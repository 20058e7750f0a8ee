//! Number backends for inversive coordinates.
//!
//! Two backends are provided: `f64` and [`Rational`] (reduced `i64`
//! fractions). All geometry in [`crate::mobius`] is generic over [`Scalar`],
//! so the exact backend reproduces the float code path operation for
//! operation with no rounding.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact scalar used by the exact backend.
pub type Rational = Ratio<i64>;

/// Largest numerator magnitude the exact backend accepts after an action.
/// Products of two such values (times small matrix entries) stay far from
/// `i64::MAX`.
const EXACT_NUMER_LIMIT: i64 = 1 << 40;
const EXACT_DENOM_LIMIT: i64 = 1 << 20;

/// Float tolerance for the quadratic form and for tangency tests.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Below this magnitude a float curvature is treated as zero (the image is a line).
pub const FLOAT_LINE_THRESHOLD: f64 = 1e-12;

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    /// Hashable dedup key of a coordinate vector.
    type Key: Hash + Eq + Clone + Debug + Send + Sync;

    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_f64(v: f64) -> Option<Self>;

    /// Slack used in closed-set tests: zero for the exact backend.
    fn tolerance() -> Self;

    /// True iff the value should be treated as zero.
    fn is_negligible(&self) -> bool;

    fn abs_val(&self) -> Self;

    /// Undo drift of the quadratic form. Identity on the exact backend.
    fn renormalize(v: [Self; 4]) -> [Self; 4];

    /// Guards the exact backend against integer overflow.
    fn check_magnitude(v: &[Self; 4]) -> Result<()>;

    /// Primary key plus alternates for coordinates that sit close to a
    /// rounding boundary (float only).
    fn dedup_keys(v: &[Self; 4], quantum: f64) -> (Self::Key, Vec<Self::Key>);

    /// Text form used by the circle-set file format.
    fn format(&self) -> String;
    fn parse(s: &str) -> Result<Self>;

    fn half(&self) -> Self {
        self.clone() / (Self::one() + Self::one())
    }

    fn is_zero_exact(&self) -> bool {
        *self == Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    type Key = [i64; 4];

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn is_negligible(&self) -> bool {
        self.abs() < FLOAT_LINE_THRESHOLD
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn renormalize(v: [f64; 4]) -> [f64; 4] {
        // Only lines are rescaled: there Q = wx² + wy² is well conditioned,
        // while for circles Q involves cancellation and rescaling would add error.
        let [bbar, b, wx, wy] = v;
        if b == 0.0 {
            let s = wx.hypot(wy);
            if s > 0.0 && s != 1.0 {
                return [bbar / s, 0.0, wx / s, wy / s];
            }
        }
        v
    }

    fn check_magnitude(v: &[f64; 4]) -> Result<()> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Overflow)
        }
    }

    fn dedup_keys(v: &[f64; 4], quantum: f64) -> ([i64; 4], Vec<[i64; 4]>) {
        let mut primary = [0i64; 4];
        let mut other = [None; 4];
        for (i, x) in v.iter().enumerate() {
            let s = x / quantum;
            let k = s.round();
            primary[i] = k as i64;
            let frac = s - s.floor();
            if (frac - 0.5).abs() < 0.05 {
                let alt = if k > s { k - 1.0 } else { k + 1.0 };
                other[i] = Some(alt as i64);
            }
        }
        let mut alternates = Vec::new();
        if other.iter().any(Option::is_some) {
            for mask in 1u32..16 {
                let mut key = primary;
                let mut ok = true;
                for i in 0..4 {
                    if mask & (1 << i) != 0 {
                        match other[i] {
                            Some(a) => key[i] = a,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
                if ok {
                    alternates.push(key);
                }
            }
        }
        (primary, alternates)
    }

    fn format(&self) -> String {
        format!("{:.16e}", self)
    }

    fn parse(s: &str) -> Result<Self> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    type Key = [Rational; 4];

    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn to_f64(&self) -> f64 {
        if self.denom().is_one() {
            *self.numer() as f64
        } else {
            self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
        }
    }

    fn from_f64(v: f64) -> Option<Self> {
        Ratio::approximate_float(v)
    }

    fn tolerance() -> Self {
        Ratio::zero()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn renormalize(v: [Rational; 4]) -> [Rational; 4] {
        v
    }

    fn check_magnitude(v: &[Rational; 4]) -> Result<()> {
        let ok = v
            .iter()
            .all(|x| x.numer().abs() < EXACT_NUMER_LIMIT && *x.denom() < EXACT_DENOM_LIMIT);
        if ok {
            Ok(())
        } else {
            Err(Error::Overflow)
        }
    }

    fn dedup_keys(v: &[Rational; 4], _quantum: f64) -> ([Rational; 4], Vec<[Rational; 4]>) {
        (*v, Vec::new())
    }

    fn format(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
                let q: i64 = q.trim().parse().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
                if q == 0 {
                    return Err(Error::Parse(format!("{s:?}: zero denominator")));
                }
                Ratio::new(p, q)
            }
            None => Ratio::from_integer(
                s.parse::<i64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?,
            ),
        };
        Ok(parsed)
    }
}

/// Convenience constructor for exact values.
pub fn rat(p: i64, q: i64) -> Rational {
    Ratio::new(p, q)
}
