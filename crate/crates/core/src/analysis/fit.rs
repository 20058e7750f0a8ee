//! Log-log least squares and the equidistribution ratio.

use serde::{Deserialize, Serialize};

use crate::counting::{count_curvature, CountSeries, Region};
use crate::error::{Error, Result};
use crate::mobius::Scalar;
use crate::packing::CircleSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub log_coeff: f64,
    pub r_squared: f64,
    pub stderr_exponent: f64,
    /// Smallest and largest parameter used.
    pub window: (f64, f64),
    pub n_points: usize,
}

impl PowerFit {
    pub fn coefficient(&self) -> f64 {
        self.log_coeff.exp()
    }
}

/// Ordinary least squares `y = a + b·x`, returning `(b, a, R², stderr(b))`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(Error::InsufficientData(format!("least squares needs 3 or more points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let stderr = (ss_res / (nf - 2.0) / sxx).sqrt();
    Ok((slope, intercept, r2, stderr))
}

/// Fits `count ≈ c·f(param)^exponent` where `f` is the parameter itself or
/// its reciprocal, after dropping the lowest `drop_low` fraction of the
/// log-`f` range.
fn fit_log(series: &CountSeries, drop_low: f64, reciprocal: bool) -> Result<PowerFit> {
    if !(0.0..1.0).contains(&drop_low) {
        return Err(Error::InvalidArgument(format!("drop fraction must lie in [0, 1), got {drop_low}")));
    }
    let pts: Vec<(f64, f64, u64)> = series
        .points()
        .map(|(p, c)| (if reciprocal { -p.ln() } else { p.ln() }, p, c))
        .collect();
    if pts.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let cut = lo + drop_low * (hi - lo);
    let used: Vec<&(f64, f64, u64)> = pts.iter().filter(|p| p.0 >= cut - 1e-12 * (1.0 + cut.abs())).collect();
    if used.len() < 4 {
        return Err(Error::InsufficientData(format!("{} usable points, need at least 4", used.len())));
    }
    if used.iter().any(|p| p.2 == 0) {
        return Err(Error::InsufficientData("zero count inside the fit window".into()));
    }
    let x: Vec<f64> = used.iter().map(|p| p.0).collect();
    let y: Vec<f64> = used.iter().map(|p| (p.2 as f64).ln()).collect();
    let (slope, intercept, r2, stderr) = ols(&x, &y)?;
    let params = used.iter().map(|p| p.1);
    let window = (params.clone().fold(f64::INFINITY, f64::min), params.fold(f64::NEG_INFINITY, f64::max));
    Ok(PowerFit { exponent: slope, log_coeff: intercept, r_squared: r2, stderr_exponent: stderr, window, n_points: used.len() })
}

/// Exponent of `count ∝ param^δ` (curvature ladders).
pub fn fit_power_law(series: &CountSeries, drop_low_fraction: f64) -> Result<PowerFit> {
    fit_log(series, drop_low_fraction, false)
}

/// Exponent of `count ∝ (1/t)^s` (area ladders).
pub fn fit_area_law(series: &CountSeries, drop_low_fraction: f64) -> Result<PowerFit> {
    fit_log(series, drop_low_fraction, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    /// `(T, N_T(E1)/N_T(E2))`.
    pub ratios: Vec<(f64, f64)>,
    /// Largest `|ratio/final − 1|` over the top half of the ladder.
    pub stabilization: f64,
}

pub fn equidist_ratio<S: Scalar>(set: &CircleSet<S>, e1: &Region, e2: &Region, ladder: &[f64]) -> Result<EquidistReport> {
    let n1 = count_curvature(set, e1, ladder)?;
    let n2 = count_curvature(set, e2, ladder)?;
    let mut ratios = Vec::with_capacity(ladder.len());
    for ((t, a), (_, b)) in n1.points().zip(n2.points()) {
        if b == 0 {
            return Err(Error::InsufficientData(format!("N_T(E2) = 0 at T = {t}")));
        }
        ratios.push((t, a as f64 / b as f64));
    }
    let last = ratios.last().expect("nonempty ladder").1;
    let top = &ratios[ratios.len() / 2..];
    let stabilization = top.iter().map(|(_, r)| (r / last - 1.0).abs()).fold(0.0, f64::max);
    Ok(EquidistReport { ratios, stabilization })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::SeriesMetadata;

    fn series(param: &str, ladder: Vec<f64>, f: impl Fn(f64) -> f64) -> CountSeries {
        let counts = ladder.iter().map(|&p| f(p).ceil() as u64).collect();
        CountSeries {
            param: param.into(),
            ladder,
            counts,
            metadata: SeriesMetadata { quantity: "synthetic".into(), region: None, packing: "none".into(), digest: None },
        }
    }

    #[test]
    fn recovers_planted_exponents() {
        let ladder: Vec<f64> = (3..=14).map(|k| 2f64.powi(k)).collect();
        let s = series("T", ladder.clone(), |t| 7.0 * t.powf(1.5));
        let fit = fit_power_law(&s, 0.5).unwrap();
        assert!((fit.exponent - 1.5).abs() < 0.02, "{fit:?}");
        assert!(fit.window.0 >= 2f64.powi(8) && fit.window.1 == 2f64.powi(14));
        for planted in [0.5, 1.0, 1.3, 1.5, 2.0] {
            let s = series("T", ladder.clone(), |t| 50.0 * t.powf(planted));
            let fit = fit_power_law(&s, 0.0).unwrap();
            assert!((fit.exponent - planted).abs() <= 2.0 * fit.stderr_exponent + 1e-3, "{planted}: {fit:?}");
        }
    }

    #[test]
    fn constant_counts_have_zero_exponent() {
        let s = series("T", (1..=8).map(|k| 2f64.powi(k)).collect(), |_| 12.0);
        let fit = fit_power_law(&s, 0.0).unwrap();
        assert_eq!(fit.exponent, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn area_law_and_short_ladders() {
        let ladder: Vec<f64> = (2..=16).rev().map(|k| 2f64.powi(-k)).collect();
        let s = series("t", ladder, |t| 5.0 * t.powf(-0.65));
        let fit = fit_area_law(&s, 0.0).unwrap();
        assert!((fit.exponent - 0.65).abs() < 0.02, "{fit:?}");
        let short = series("t", vec![0.01, 0.1, 0.5], |t| 1.0 / t);
        assert!(fit_area_law(&short, 0.0).is_err());
        let zero = series("T", (1..=6).map(|k| 2f64.powi(k)).collect(), |t| if t < 10.0 { 0.0 } else { t });
        assert!(matches!(fit_power_law(&zero, 0.0), Err(Error::InsufficientData(_))));
    }
}
