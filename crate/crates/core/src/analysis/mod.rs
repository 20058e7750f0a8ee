//! Exponent fits, equidistribution ratios, box counting and the collar probe.

mod dimension;
mod fit;
mod probe;

pub use dimension::{box_count_dimension, DimensionEstimate, ScaleCount};
pub use fit::{equidist_ratio, fit_area_law, fit_power_law, ols, EquidistReport, PowerFit};
pub use probe::{collar, regularity_probe, CollarCount, ProbeOutcome};
