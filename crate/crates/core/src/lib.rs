//! Depth-contour occlusion for mixed reality from rectified stereo frames.
//!
//! The pipeline runs, per frame:
//!
//! 1. [`stereo`]: adaptive AD-census matching at quarter scale, giving a sparse
//!    full-resolution depth map.
//! 2. [`flow`]: dense inverse-search optical flow from the middle frame of a
//!    three-frame window towards its past and future neighbours.
//! 3. [`contour`]: flow-gradient amplitudes fused across both directions gate a
//!    Canny detector so only depth discontinuities survive.
//! 4. [`densify`]: a quadratic objective (data, contour-aware smoothness and
//!    temporal stability) propagates sparse depth to every pixel.
//! 5. [`occlude`]: a virtual layer is rasterized and depth-tested against the
//!    dense map.

pub mod contour;
pub mod densify;
pub mod error;
pub mod flow;
pub mod imgcore;
pub mod occlude;
pub mod stereo;

pub use error::{Error, Result};
pub use imgcore::{ColorImage, FloatMap, GrayImage, PipelineConfig};
