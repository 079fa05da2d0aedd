//! Interval unions, exact image measures, certified brackets and covering sums.

mod hausdorff;
mod image;
mod interval;

pub use hausdorff::{hausdorff_upper, CoveringBound};
pub use image::{
    directional_measure, image_measure, image_measure_with, projection_bracket, scan_directions,
    square_directions, ChainLink, MeasureBracket, MergeStrategy,
};
pub use interval::{merge_sorted, normalize, IntervalUnion};
