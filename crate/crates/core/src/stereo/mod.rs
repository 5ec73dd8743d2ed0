//! Two-stage adaptive AD-census stereo matching at quarter scale.

mod census;
mod cost;
mod cross;
mod depth;
mod disparity;

pub use census::{census_transform, hamming, CensusMap};
pub use cost::{
    ad_census_alpha, ad_census_cost, aggregate_costs, compute_cost_volume, CostVolume, OUT_OF_RANGE_COST,
};
pub use cross::{build_cross_windows, Arms, CrossWindowField};
pub use depth::{depth_from_disparity, disparity_from_depth, disparity_to_sparse_depth, SparseDepthMap};
pub use disparity::{refine_disparity_histogram, select_disparity_wta, DisparityMap, OUTLIER_MIN_REGION};

use crate::error::Result;
use crate::imgcore::{GrayImage, PipelineConfig};

/// Intermediate and final products of [`match_stereo`].
#[derive(Debug, Clone)]
pub struct StereoOutput {
    pub windows: CrossWindowField,
    pub initial: DisparityMap,
    pub refined: DisparityMap,
    pub sparse: SparseDepthMap,
}

/// Runs every stereo stage on an already downsampled pair.
pub fn match_stereo(
    left_quarter: &GrayImage,
    right_quarter: &GrayImage,
    full_dims: (usize, usize),
    cfg: &PipelineConfig,
) -> Result<StereoOutput> {
    let windows = build_cross_windows(left_quarter, cfg);
    let raw = compute_cost_volume(left_quarter, right_quarter, &windows, cfg)?;
    let agg = aggregate_costs(&raw, &windows)?;
    let initial = select_disparity_wta(&agg);
    let refined = refine_disparity_histogram(&initial, &windows, cfg.hist_iterations)?;
    let sparse = disparity_to_sparse_depth(&refined, full_dims, cfg)?;
    Ok(StereoOutput {
        windows,
        initial,
        refined,
        sparse,
    })
}
