//! Batch driver for the depth-contour occlusion pipeline: manifests,
//! synthetic ground-truth scenes, per-frame orchestration and timing.

pub mod bench;
pub mod manifest;
pub mod pipeline;
pub mod synth;
pub mod timings;

use dco_core::Error;

/// Process exit status for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Codec { .. } => 2,
        Error::Unsolvable(_) => 3,
        Error::Dimension(_) | Error::Input(_) | Error::Config(_) | Error::Io { .. } => 1,
    }
}
