//! Circles, Möbius motions and the hyperbolic formulas the counters use.

mod circle;
mod hyperbolic;
mod motion;
mod scalar;

pub use circle::{
    circle_from_center_radius, line_from_normal_offset, reflect_in, unit_circle, Circle, CircleKind,
};
pub use hyperbolic::{
    area_from_ratio, beta, beta_inverse, busemann, h3_distance, hyperbolic_area, hyperbolic_center,
    HalfSpacePoint,
};
pub use motion::{apply_motion, circle_through, sample_points, BoundaryPoint, LorentzMap, Motion};
pub use scalar::{rat, Rational, Scalar, FLOAT_LINE_THRESHOLD, FLOAT_TOLERANCE};
