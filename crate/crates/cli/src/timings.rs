//! Per-frame stage timings in the taxonomy of the original time tables.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    FilterArea,
    InitialParallax,
    ParallaxOptimisation,
    SparseMap,
    OpticalFlow,
    Amplitude,
    Fusion,
    BoxFilter,
    Normalisation,
    GaussianFiltering,
    DepthContourExtraction,
    Densification,
    Rendering,
    Other,
}

impl Stage {
    pub const ALL: [Stage; 14] = [
        Stage::FilterArea,
        Stage::InitialParallax,
        Stage::ParallaxOptimisation,
        Stage::SparseMap,
        Stage::OpticalFlow,
        Stage::Amplitude,
        Stage::Fusion,
        Stage::BoxFilter,
        Stage::Normalisation,
        Stage::GaussianFiltering,
        Stage::DepthContourExtraction,
        Stage::Densification,
        Stage::Rendering,
        Stage::Other,
    ];

    /// Column name used in CSV output.
    pub fn key(self) -> &'static str {
        match self {
            Stage::FilterArea => "filter_area",
            Stage::InitialParallax => "initial_parallax",
            Stage::ParallaxOptimisation => "parallax_optimisation",
            Stage::SparseMap => "sparse_map",
            Stage::OpticalFlow => "optical_flow",
            Stage::Amplitude => "amplitude",
            Stage::Fusion => "fusion",
            Stage::BoxFilter => "box_filter",
            Stage::Normalisation => "normalisation",
            Stage::GaussianFiltering => "gaussian_filtering",
            Stage::DepthContourExtraction => "depth_contour_extraction",
            Stage::Densification => "densification",
            Stage::Rendering => "rendering",
            Stage::Other => "other",
        }
    }

    /// Row label for the human-readable report.
    pub fn label(self) -> &'static str {
        match self {
            Stage::FilterArea => "Adaptive filter area construction",
            Stage::InitialParallax => "Initial parallax",
            Stage::ParallaxOptimisation => "Parallax optimisation",
            Stage::SparseMap => "Sparse map",
            Stage::OpticalFlow => "Bidirectional optical flow",
            Stage::Amplitude => "Amplitude",
            Stage::Fusion => "Fusion",
            Stage::BoxFilter => "Box filter",
            Stage::Normalisation => "Normalisation",
            Stage::GaussianFiltering => "Gaussian filtering",
            Stage::DepthContourExtraction => "Depth contour extraction",
            Stage::Densification => "Densification",
            Stage::Rendering => "Rendering",
            Stage::Other => "Other",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Milliseconds per stage for one frame. `Other` absorbs everything outside
/// the measured stages, so the stages always sum to the frame total.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageTimings {
    ms: [f64; 14],
}

impl StageTimings {
    pub fn get(&self, stage: Stage) -> f64 {
        self.ms[stage.slot()]
    }

    pub fn add(&mut self, stage: Stage, d: Duration) {
        self.ms[stage.slot()] += d.as_secs_f64() * 1e3;
    }

    /// Runs `f`, charging its wall time to `stage`.
    pub fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.add(stage, start.elapsed());
        out
    }

    /// Sum of every stage including `Other`.
    pub fn total(&self) -> f64 {
        self.ms.iter().sum()
    }

    /// Sets `Other` so the stages add up to `total`.
    pub fn close(&mut self, total: Duration) {
        let measured: f64 = Stage::ALL.iter().filter(|s| **s != Stage::Other).map(|s| self.get(*s)).sum();
        self.ms[Stage::Other.slot()] = (total.as_secs_f64() * 1e3 - measured).max(0.0);
    }
}

pub fn csv_header() -> String {
    let mut s = String::from("frame");
    for st in Stage::ALL {
        s.push(',');
        s.push_str(st.key());
    }
    s.push_str(",total\n");
    s
}

pub fn csv_row(index: u64, t: &StageTimings) -> String {
    let mut s = index.to_string();
    for st in Stage::ALL {
        let _ = write!(s, ",{:.3}", t.get(st));
    }
    let _ = writeln!(s, ",{:.3}", t.total());
    s
}
