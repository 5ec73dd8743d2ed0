//! Optical flow for the three-frame keyframe window.

mod dis;
mod field;
pub mod flo;
mod window;

pub use dis::{compute_flow, compute_flow_with, pyramid_depth, DisParams};
pub use field::FlowField;
pub use flo::{decode_flo, encode_flo, read_flo, write_flo};
pub use window::{KeyframeBuffer, KeyframeWindow};

use crate::error::Result;
use crate::imgcore::PipelineConfig;

/// Backward (`middle -> past`) and forward (`middle -> future`) flow, both on
/// the middle frame's pixel grid.
#[derive(Debug, Clone)]
pub struct BidirectionalFlow {
    pub past: FlowField,
    pub future: FlowField,
}

pub fn compute_bidirectional_flow(window: &KeyframeWindow, cfg: &PipelineConfig) -> Result<BidirectionalFlow> {
    let (past, future) = rayon::join(
        || compute_flow(&window.middle, &window.past, cfg),
        || compute_flow(&window.middle, &window.future, cfg),
    );
    Ok(BidirectionalFlow {
        past: past?,
        future: future?,
    })
}
