//! Virtual-object rendering and real/virtual occlusion compositing.

mod composite;
mod mesh;
mod render;

pub use composite::{composite, composite_with_depth, OcclusionMask};
pub use mesh::{decode_obj, encode_obj, read_obj, Pose, TriangleMesh, DEFAULT_VERTEX_COLOR};
pub use render::{default_principal, render_virtual, VirtualLayer};
