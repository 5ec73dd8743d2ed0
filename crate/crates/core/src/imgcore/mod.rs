//! Raster types, codecs, image pyramids and pipeline configuration.

pub mod codec;
mod config;
mod pyramid;
mod raster;

pub use codec::{read_image, read_image_auto, Image, ImageFormat};
pub use config::PipelineConfig;
pub use pyramid::{build_pyramid, downsample_half, MIN_PYRAMID_DIM};
pub use raster::{ColorImage, FloatMap, GrayImage, LUMA_WEIGHTS};
