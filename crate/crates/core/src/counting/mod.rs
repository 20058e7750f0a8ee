//! Regions, predicates and the counting functions.

mod count;
mod cusp;
mod index;
pub mod region;

pub use count::{
    count_curvature, count_geodesic, count_hyparea, disk_ratio, hemisphere_meets_box, CountSeries, SeriesMetadata,
};
pub use cusp::{cusp_count_inf, cusp_count_pm1, cusp_excess, cusp_plan, strip_cusp_set, CuspPlan};
pub(crate) use count::require_coverage;
pub use index::GridIndex;
pub use region::{circle_meets_region, circle_meets_region_sampled, Bounds, Region, REGION_TOLERANCE};
