//! Depth-contour extraction: flow-gradient amplitudes, bidirectional fusion
//! and a depth-gated Canny detector.

mod canny;
mod fusion;
mod maps;
mod polar;

pub use canny::{
    canny_gradients, depth_gated_hysteresis, extract_depth_contours, gaussian_blur, non_maximum_suppression,
    sobel_gradients, CannyGradients, GAUSS_RADIUS,
};
pub use fusion::{box_filter, fuse_amplitudes, normalize_amplitude, projection_confidence, MIN_FLOW_MAGNITUDE};
pub use maps::{quarter_coords, AmplitudeMap, EdgeMask, IntensityGradientMap};
pub use polar::{flow_to_polar, gradient_amplitude, to_polar, PolarFlowField};

use crate::error::Result;
use crate::flow::BidirectionalFlow;
use crate::imgcore::PipelineConfig;

/// Normalized, box-filtered fused amplitude: the quarter-scale depth-contour filter.
pub fn depth_contour_filter(flow: &BidirectionalFlow, cfg: &PipelineConfig) -> Result<AmplitudeMap> {
    let m_past = gradient_amplitude(&flow_to_polar(&flow.past));
    let m_future = gradient_amplitude(&flow_to_polar(&flow.future));
    let fused = fuse_amplitudes(&flow.past, &flow.future, &m_past, &m_future, cfg)?;
    Ok(normalize_amplitude(&box_filter(&fused, cfg.box_radius)))
}
