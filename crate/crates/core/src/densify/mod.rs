//! Contour-aware densification of sparse depth.

mod solver;
mod system;

pub use solver::{solve_dense_depth, solve_with_report, SolveReport};
pub use system::{assemble_system, smoothness_weight, ConstraintSystem, DenseDepthMap};
