//! Frame-sequential orchestration of every stage.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use dco_core::contour::{
    box_filter, depth_gated_hysteresis, flow_to_polar, fuse_amplitudes, gaussian_blur, gradient_amplitude,
    non_maximum_suppression, normalize_amplitude, sobel_gradients, AmplitudeMap, EdgeMask, IntensityGradientMap,
};
use dco_core::densify::{assemble_system, solve_with_report, DenseDepthMap};
use dco_core::flow::{compute_bidirectional_flow, write_flo, BidirectionalFlow, KeyframeWindow};
use dco_core::imgcore::codec::pfm::write_pfm;
use dco_core::imgcore::codec::write_color;
use dco_core::imgcore::{downsample_half, read_image_auto};
use dco_core::occlude::{composite_with_depth, default_principal, render_virtual, Pose, TriangleMesh, VirtualLayer};
use dco_core::stereo::{
    aggregate_costs, build_cross_windows, compute_cost_volume, disparity_to_sparse_depth, refine_disparity_histogram,
    select_disparity_wta, DisparityMap, SparseDepthMap,
};
use dco_core::{ColorImage, Error, FloatMap, GrayImage, PipelineConfig, Result};

use crate::manifest::FrameRecord;
use crate::timings::{csv_header, csv_row, Stage, StageTimings};

/// A decoded stereo pair ready for processing.
#[derive(Debug, Clone)]
pub struct LoadedFrame {
    pub index: u64,
    pub color: ColorImage,
    pub left: GrayImage,
    pub right: GrayImage,
    pub pose: Option<Pose>,
}

impl LoadedFrame {
    pub fn load(record: &FrameRecord) -> Result<Self> {
        let left = read_image_auto(&record.left)?;
        let right = read_image_auto(&record.right)?.into_gray();
        let color = left.clone().into_color();
        let left = left.into_gray();
        if left.dims() != right.dims() {
            return Err(Error::Dimension(format!("left {:?} and right {:?} views differ", left.dims(), right.dims())));
        }
        Ok(Self { index: record.index, color, left, right, pose: record.pose })
    }

    pub fn from_gray(index: u64, left: GrayImage, right: GrayImage, pose: Option<Pose>) -> Self {
        Self { index, color: left.to_color(), left, right, pose }
    }
}

/// Intermediates kept for `--debug-dir`.
#[derive(Debug, Clone)]
pub struct DebugProducts {
    pub disparity: DisparityMap,
    pub sparse: SparseDepthMap,
    pub flow: BidirectionalFlow,
    pub m_fuse: AmplitudeMap,
    pub contours: EdgeMask,
    pub m_i: IntensityGradientMap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct FrameOutput {
    pub index: u64,
    pub image: ColorImage,
    /// Absent for frames emitted unmodified outside a full keyframe window.
    pub mask: Option<EdgeMask>,
    /// Dense depth the frame was composited against.
    pub dense: Option<DenseDepthMap>,
    pub solve: Option<SolveStats>,
    /// The solve had no anchors; the previous dense map (if any) was used.
    pub unsolvable: bool,
    pub timings: StageTimings,
    pub debug: Option<Box<DebugProducts>>,
}

impl FrameOutput {
    pub fn is_composited(&self) -> bool {
        self.mask.is_some()
    }
}

struct Pending {
    frame: LoadedFrame,
    quarter: GrayImage,
    load_time: Duration,
}

/// Streaming pipeline: push frames in order, collect outputs as they complete.
///
/// A frame is composited once it is the middle of a full three-frame window,
/// so output lags input by one frame. The first frame and the last one are
/// emitted unmodified.
pub struct Pipeline {
    cfg: PipelineConfig,
    mesh: Option<TriangleMesh>,
    keep_debug: bool,
    window: VecDeque<Pending>,
    pushed: usize,
    prev_dense: Option<DenseDepthMap>,
    last_emitted: Option<u64>,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, mesh: Option<TriangleMesh>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, mesh, keep_debug: false, window: VecDeque::new(), pushed: 0, prev_dense: None, last_emitted: None })
    }

    pub fn keep_debug(mut self, on: bool) -> Self {
        self.keep_debug = on;
        self
    }

    pub fn push(&mut self, frame: LoadedFrame) -> Result<Option<FrameOutput>> {
        self.push_timed(frame, Duration::ZERO)
    }

    /// `load_time` is charged to the frame's `Other` stage.
    pub fn push_timed(&mut self, frame: LoadedFrame, load_time: Duration) -> Result<Option<FrameOutput>> {
        if let Some(prev) = self.window.back() {
            if prev.frame.left.dims() != frame.left.dims() {
                return Err(Error::Dimension(format!(
                    "frame {} is {:?}, sequence is {:?}",
                    frame.index,
                    frame.left.dims(),
                    prev.frame.left.dims()
                )));
            }
            if frame.index <= prev.frame.index {
                return Err(Error::Input(format!("frame index {} does not increase", frame.index)));
            }
        }
        let start = Instant::now();
        let quarter = downsample_half(&frame.left)?;
        let load_time = load_time + start.elapsed();
        self.window.push_back(Pending { frame, quarter, load_time });
        self.pushed += 1;
        if self.window.len() > 3 {
            self.window.pop_front();
        }
        if self.pushed == 1 {
            return Ok(Some(self.passthrough(0)));
        }
        if self.window.len() == 3 {
            return self.process_middle().map(Some);
        }
        Ok(None)
    }

    /// Emits the newest frame unmodified unless it was already emitted.
    pub fn finish(&mut self) -> Option<FrameOutput> {
        let last = self.window.len().checked_sub(1)?;
        (self.last_emitted != Some(self.window[last].frame.index)).then(|| self.passthrough(last))
    }

    fn passthrough(&mut self, slot: usize) -> FrameOutput {
        let p = &self.window[slot];
        let mut timings = StageTimings::default();
        timings.close(p.load_time);
        self.last_emitted = Some(p.frame.index);
        FrameOutput {
            index: p.frame.index,
            image: p.frame.color.clone(),
            mask: None,
            dense: None,
            solve: None,
            unsolvable: false,
            timings,
            debug: None,
        }
    }

    fn process_middle(&mut self) -> Result<FrameOutput> {
        let start = Instant::now();
        let cfg = &self.cfg;
        let mut t = StageTimings::default();
        let (past, mid, future) = (&self.window[0], &self.window[1], &self.window[2]);
        let frame = &mid.frame;
        let full = frame.left.dims();

        let right_q = downsample_half(&frame.right)?;
        let windows = t.time(Stage::FilterArea, || build_cross_windows(&mid.quarter, cfg));
        let initial = t.time(Stage::InitialParallax, || -> Result<_> {
            let raw = compute_cost_volume(&mid.quarter, &right_q, &windows, cfg)?;
            Ok(select_disparity_wta(&aggregate_costs(&raw, &windows)?))
        })?;
        let refined =
            t.time(Stage::ParallaxOptimisation, || refine_disparity_histogram(&initial, &windows, cfg.hist_iterations))?;
        let sparse = t.time(Stage::SparseMap, || disparity_to_sparse_depth(&refined, full, cfg))?;

        let window = KeyframeWindow {
            past: past.quarter.clone(),
            middle: mid.quarter.clone(),
            future: future.quarter.clone(),
        };
        let flow = t.time(Stage::OpticalFlow, || compute_bidirectional_flow(&window, cfg))?;
        let (m_past, m_future) = t.time(Stage::Amplitude, || {
            (gradient_amplitude(&flow_to_polar(&flow.past)), gradient_amplitude(&flow_to_polar(&flow.future)))
        });
        let fused = t.time(Stage::Fusion, || fuse_amplitudes(&flow.past, &flow.future, &m_past, &m_future, cfg))?;
        let boxed = t.time(Stage::BoxFilter, || box_filter(&fused, cfg.box_radius));
        let m_fuse = t.time(Stage::Normalisation, || normalize_amplitude(&boxed));

        let blurred = t.time(Stage::GaussianFiltering, || gaussian_blur(&frame.left, cfg.gauss_sigma));
        let (contours, m_i) = t.time(Stage::DepthContourExtraction, || -> Result<_> {
            let g = sobel_gradients(&blurred, full.0, full.1);
            let nms = non_maximum_suppression(&g);
            let mask = depth_gated_hysteresis(&g.magnitude, &nms, full.0, full.1, &m_fuse, cfg)?;
            Ok((mask, IntensityGradientMap::new(FloatMap::new(full.0, full.1, g.magnitude)?)?))
        })?;

        let solved = t.time(Stage::Densification, || -> Result<_> {
            let sys = assemble_system(&sparse, &contours, &m_fuse, &m_i, self.prev_dense.as_ref(), cfg)?;
            match solve_with_report(&sys, cfg) {
                Ok(rep) => Ok(Some(rep)),
                Err(Error::Unsolvable(msg)) => {
                    let fallback = if self.prev_dense.is_some() { "the previous dense map" } else { "unknown (infinitely far) depth" };
                    log::warn!("frame {}: {msg}; compositing against {fallback}", frame.index);
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })?;
        let unsolvable = solved.is_none();
        let solve = solved.as_ref().map(|r| SolveStats {
            iterations: r.iterations,
            objective: r.objective_final,
            converged: r.converged,
        });
        let dense = match solved {
            Some(r) => Some(r.depth),
            None => self.prev_dense.clone(),
        };

        let (image, mask) = t.time(Stage::Rendering, || -> Result<_> {
            let virt = match &self.mesh {
                Some(mesh) => {
                    let posed = frame.pose.map(|p| mesh.transformed(&p));
                    render_virtual(posed.as_ref().unwrap_or(mesh), cfg.focal_px, default_principal(full), full)?
                }
                None => VirtualLayer::empty(full.0, full.1),
            };
            let nodata;
            let depth = match &dense {
                Some(d) => d.map(),
                None => {
                    nodata = FloatMap::nodata(full.0, full.1);
                    &nodata
                }
            };
            composite_with_depth(&frame.color, depth, &virt)
        })?;
        t.close(start.elapsed() + mid.load_time);

        let debug = self.keep_debug.then(|| {
            Box::new(DebugProducts {
                disparity: refined,
                sparse,
                flow,
                m_fuse,
                contours,
                m_i,
            })
        });
        let index = frame.index;
        if !unsolvable {
            self.prev_dense = dense.clone();
        }
        self.last_emitted = Some(index);
        Ok(FrameOutput { index, image, mask: Some(mask), dense, solve, unsolvable, timings: t, debug })
    }
}

/// Outcome of [`run_pipeline`].
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub frames: usize,
    pub composited: usize,
    pub unsolvable: usize,
    pub timings: Vec<(u64, StageTimings)>,
}

/// Error annotated with the frame it occurred on.
#[derive(Debug, thiserror::Error)]
#[error("frame {index}: {source}")]
pub struct FrameError {
    pub index: u64,
    #[source]
    pub source: Error,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Core(#[from] Error),
}

impl RunError {
    pub fn core(&self) -> &Error {
        match self {
            RunError::Frame(f) => &f.source,
            RunError::Core(e) => e,
        }
    }
}

/// Output locations for [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub out_dir: PathBuf,
    pub debug_dir: Option<PathBuf>,
}

impl OutputPaths {
    pub fn composite(&self, index: u64) -> PathBuf {
        self.out_dir.join(format!("frame_{index:06}_composite.ppm"))
    }

    pub fn mask(&self, index: u64) -> PathBuf {
        self.out_dir.join(format!("frame_{index:06}_mask.pgm"))
    }

    pub fn dense(&self, index: u64) -> PathBuf {
        self.out_dir.join(format!("frame_{index:06}_dense.pfm"))
    }
}

fn create_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })
}

fn write_text(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, s).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })
}

/// Runs the full pipeline over `frames`, writing per-frame artifacts,
/// `timings.csv` and `solver.csv` into the output directory.
///
/// Fails with an unsolvable-frame error only when every composited frame
/// had nothing to anchor its dense depth.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    frames: &[FrameRecord],
    mesh: Option<&TriangleMesh>,
    out: &OutputPaths,
) -> std::result::Result<RunSummary, RunError> {
    if frames.len() < 3 {
        return Err(Error::Input(format!("sequence has {} frames; at least 3 are required", frames.len())).into());
    }
    create_dir(&out.out_dir)?;
    if let Some(d) = &out.debug_dir {
        create_dir(d)?;
    }
    let mut pipe = Pipeline::new(cfg.clone(), mesh.cloned())?.keep_debug(out.debug_dir.is_some());
    let mut summary = RunSummary::default();
    let mut timings_csv = csv_header();
    let mut solver_csv = String::from("frame,iterations,objective,converged\n");
    let mut emit = |o: FrameOutput, summary: &mut RunSummary| -> Result<()> {
        write_frame(&o, out)?;
        summary.frames += 1;
        if o.is_composited() {
            summary.composited += 1;
            summary.unsolvable += o.unsolvable as usize;
            timings_csv.push_str(&csv_row(o.index, &o.timings));
            if let Some(s) = o.solve {
                solver_csv.push_str(&format!("{},{},{:.9e},{}\n", o.index, s.iterations, s.objective, s.converged));
            }
        }
        summary.timings.push((o.index, o.timings));
        Ok(())
    };
    for rec in frames {
        let start = Instant::now();
        let frame = LoadedFrame::load(rec).map_err(|source| FrameError { index: rec.index, source })?;
        let out_frame = pipe
            .push_timed(frame, start.elapsed())
            .map_err(|source| FrameError { index: rec.index, source })?;
        if let Some(o) = out_frame {
            let index = o.index;
            emit(o, &mut summary).map_err(|source| FrameError { index, source })?;
        }
    }
    if let Some(o) = pipe.finish() {
        let index = o.index;
        emit(o, &mut summary).map_err(|source| FrameError { index, source })?;
    }
    write_text(&out.out_dir.join("timings.csv"), &timings_csv)?;
    write_text(&out.out_dir.join("solver.csv"), &solver_csv)?;
    if summary.composited > 0 && summary.unsolvable == summary.composited {
        return Err(Error::Unsolvable("no frame had sparse depth to anchor densification".into()).into());
    }
    Ok(summary)
}

fn write_frame(o: &FrameOutput, out: &OutputPaths) -> Result<()> {
    write_color(&o.image, out.composite(o.index))?;
    if let Some(m) = &o.mask {
        m.write_pgm(out.mask(o.index))?;
    }
    if let Some(d) = &o.dense {
        write_pfm(d.map(), out.dense(o.index))?;
    }
    if let (Some(dbg), Some(dir)) = (&o.debug, &out.debug_dir) {
        let p = |kind: &str| dir.join(format!("frame_{:06}_{kind}", o.index));
        let disp = dbg.disparity.to_float_map();
        write_pfm(&disp, p("disparity.pfm"))?;
        write_color(&false_color(&disp, dbg.disparity.d_min() as f32, dbg.disparity.d_max() as f32), p("disparity.ppm"))?;
        write_pfm(dbg.sparse.map(), p("sparse.pfm"))?;
        write_flo(&dbg.flow.past, p("flow_past.flo"))?;
        write_flo(&dbg.flow.future, p("flow_future.flo"))?;
        write_pfm(&dbg.m_fuse.to_float_map(), p("m_fuse.pfm"))?;
        write_pfm(dbg.m_i.map(), p("m_i.pfm"))?;
        dbg.contours.write_pgm(p("contours.pgm"))?;
    }
    Ok(())
}

/// Blue-to-red ramp over `[lo, hi]`; nodata is black.
pub fn false_color(map: &FloatMap, lo: f32, hi: f32) -> ColorImage {
    let span = (hi - lo).max(f32::EPSILON);
    ColorImage::from_fn(map.width(), map.height(), |x, y| match map.value(x, y) {
        None => [0.0; 3],
        Some(v) => {
            let t = ((v - lo) / span).clamp(0.0, 1.0);
            [t, 1.0 - (2.0 * t - 1.0).abs(), 1.0 - t]
        }
    })
}
