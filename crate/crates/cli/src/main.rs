use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dco_cli::bench::bench;
use dco_cli::manifest::read_manifest;
use dco_cli::pipeline::{false_color, run_pipeline, LoadedFrame, OutputPaths, RunError};
use dco_cli::synth::{synth_scene, SceneSpec};
use dco_cli::exit_code;
use dco_core::contour::{depth_contour_filter, extract_depth_contours, AmplitudeMap, EdgeMask, IntensityGradientMap};
use dco_core::densify::{assemble_system, solve_with_report, DenseDepthMap};
use dco_core::flow::{compute_bidirectional_flow, read_flo, write_flo, BidirectionalFlow, KeyframeWindow};
use dco_core::imgcore::codec::pfm::{read_pfm, write_pfm};
use dco_core::imgcore::codec::write_color;
use dco_core::imgcore::{downsample_half, read_image_auto};
use dco_core::occlude::{composite_with_depth, default_principal, read_obj, render_virtual, Pose, TriangleMesh};
use dco_core::stereo::{match_stereo, SparseDepthMap};
use dco_core::{Error, PipelineConfig, Result};

/// Depth-contour occlusion for rectified stereo sequences.
#[derive(Parser)]
#[command(name = "dco", version)]
struct Cli {
    /// Pipeline configuration (key = value); defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline over a sequence manifest.
    Pipeline {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        debug_dir: Option<PathBuf>,
        /// Virtual object as ASCII OBJ (camera coordinates, metres).
        #[arg(long)]
        mesh: Option<PathBuf>,
    },
    /// Sparse depth from one full-resolution stereo pair.
    Stereo {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bidirectional quarter-scale flow for a three-frame window.
    Flow {
        #[arg(long)]
        past: PathBuf,
        #[arg(long)]
        middle: PathBuf,
        #[arg(long)]
        future: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Depth contours from serialized flows and the full-resolution middle frame.
    Contour {
        #[arg(long)]
        flow_past: PathBuf,
        #[arg(long)]
        flow_future: PathBuf,
        #[arg(long)]
        middle: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dense depth from serialized sparse depth and contour products.
    Densify {
        #[arg(long)]
        sparse: PathBuf,
        #[arg(long)]
        contours: PathBuf,
        #[arg(long)]
        m_fuse: PathBuf,
        #[arg(long)]
        m_i: PathBuf,
        /// Previous frame's dense depth for the stability term.
        #[arg(long)]
        previous: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a mesh and depth-test it against a dense depth map.
    Composite {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        dense: PathBuf,
        #[arg(long)]
        mesh: PathBuf,
        /// Sixteen row-major numbers of a rigid pose applied to the mesh.
        #[arg(long, num_args = 16, allow_negative_numbers = true)]
        pose: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic stereo sequence with ground truth.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Per-stage timing statistics.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        /// Also write the report as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SceneArgs {
    #[arg(long, default_value_t = 320)]
    width: usize,
    #[arg(long, default_value_t = 240)]
    height: usize,
    #[arg(long, default_value_t = 3)]
    frames: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 96)]
    square_size: usize,
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [112, 72])]
    square_origin: Vec<i64>,
    #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [4, 0])]
    shift: Vec<i64>,
    #[arg(long, default_value_t = 1.0)]
    z_fg: f64,
    #[arg(long, default_value_t = 2.0)]
    z_bg: f64,
    #[arg(long, default_value_t = 400.0)]
    focal_px: f64,
    #[arg(long, default_value_t = 0.12)]
    baseline_m: f64,
}

impl SceneArgs {
    fn spec(&self) -> SceneSpec {
        SceneSpec {
            width: self.width,
            height: self.height,
            frames: self.frames,
            seed: self.seed,
            square_size: self.square_size,
            square_origin: (self.square_origin[0], self.square_origin[1]),
            shift: (self.shift[0], self.shift[1]),
            z_fg: self.z_fg,
            z_bg: self.z_bg,
            focal_px: self.focal_px,
            baseline_m: self.baseline_m,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(exit_code(e.core()) as u8)
        }
    }
}

fn ensure_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })
}

fn load_mesh(p: Option<&Path>) -> Result<Option<TriangleMesh>> {
    p.map(read_obj).transpose()
}

fn run(cli: Cli) -> std::result::Result<(), RunError> {
    let cfg = match &cli.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::Pipeline { manifest, out, debug_dir, mesh } => {
            let frames = read_manifest(&manifest)?;
            let mesh = load_mesh(mesh.as_deref())?;
            let s = run_pipeline(&cfg, &frames, mesh.as_ref(), &OutputPaths { out_dir: out, debug_dir })?;
            log::info!(
                "{} frame(s), {} composited, {} without a fresh dense solve",
                s.frames,
                s.composited,
                s.unsolvable
            );
        }
        Command::Stereo { left, right, out } => {
            let l = read_image_auto(&left)?.into_gray();
            let r = read_image_auto(&right)?.into_gray();
            let st = match_stereo(&downsample_half(&l)?, &downsample_half(&r)?, l.dims(), &cfg)?;
            ensure_dir(&out)?;
            let disp = st.refined.to_float_map();
            write_pfm(&disp, out.join("disparity.pfm"))?;
            write_color(&false_color(&disp, cfg.d_min as f32, cfg.d_max as f32), out.join("disparity.ppm"))?;
            write_pfm(st.sparse.map(), out.join("sparse.pfm"))?;
            log::info!("{} valid sparse depth samples", st.sparse.map().valid_count());
        }
        Command::Flow { past, middle, future, out } => {
            let q = |p: &Path| -> Result<_> { downsample_half(&read_image_auto(p)?.into_gray()) };
            let window = KeyframeWindow { past: q(&past)?, middle: q(&middle)?, future: q(&future)? };
            let flow = compute_bidirectional_flow(&window, &cfg)?;
            ensure_dir(&out)?;
            write_flo(&flow.past, out.join("flow_past.flo"))?;
            write_flo(&flow.future, out.join("flow_future.flo"))?;
        }
        Command::Contour { flow_past, flow_future, middle, out } => {
            let flow = BidirectionalFlow { past: read_flo(&flow_past)?, future: read_flo(&flow_future)? };
            let m_fuse = depth_contour_filter(&flow, &cfg)?;
            let gray = read_image_auto(&middle)?.into_gray();
            let (mask, m_i) = extract_depth_contours(&gray, &m_fuse, &cfg)?;
            ensure_dir(&out)?;
            write_pfm(&m_fuse.to_float_map(), out.join("m_fuse.pfm"))?;
            write_pfm(m_i.map(), out.join("m_i.pfm"))?;
            mask.write_pgm(out.join("contours.pgm"))?;
            log::info!("{} contour pixels", mask.count());
        }
        Command::Densify { sparse, contours, m_fuse, m_i, previous, out } => {
            let sparse = SparseDepthMap::new(read_pfm(&sparse)?)?;
            let contours = EdgeMask::read_pgm(&contours)?;
            let m_fuse = AmplitudeMap::from_float_map(&read_pfm(&m_fuse)?)?;
            let m_i = IntensityGradientMap::new(read_pfm(&m_i)?)?;
            let previous = previous.map(|p| read_pfm(&p).and_then(DenseDepthMap::new)).transpose()?;
            let sys = assemble_system(&sparse, &contours, &m_fuse, &m_i, previous.as_ref(), &cfg)?;
            let rep = solve_with_report(&sys, &cfg)?;
            write_pfm(rep.depth.map(), &out)?;
            println!("iterations,objective,converged");
            println!("{},{:.9e},{}", rep.iterations, rep.objective_final, rep.converged);
        }
        Command::Composite { real, dense, mesh, pose, out } => {
            let real = read_image_auto(&real)?.into_color();
            let dense = read_pfm(&dense)?;
            let mut mesh = read_obj(&mesh)?;
            if let Some(p) = pose {
                mesh = mesh.transformed(&Pose::from_row_major(p.try_into().expect("clap enforces 16 values"))?);
            }
            let dims = real.dims();
            let virt = render_virtual(&mesh, cfg.focal_px, default_principal(dims), dims)?;
            let (img, mask) = composite_with_depth(&real, &dense, &virt)?;
            ensure_dir(&out)?;
            write_color(&img, out.join("composite.ppm"))?;
            mask.write_pgm(out.join("mask.pgm"))?;
            log::info!("{} virtual pixels visible", mask.count());
        }
        Command::Synth { out, scene } => {
            let manifest = synth_scene(&scene.spec(), &out)?;
            log::info!("wrote {}", manifest.display());
        }
        Command::Bench { manifest, mesh, repetitions, out } => {
            let records = read_manifest(&manifest)?;
            let frames = records
                .iter()
                .map(|r| LoadedFrame::load(r).map_err(|source| dco_cli::pipeline::FrameError { index: r.index, source }))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let mesh = load_mesh(mesh.as_deref())?;
            let report = bench(&cfg, &frames, mesh.as_ref(), repetitions)?;
            println!("{report}");
            if let Some(p) = out {
                std::fs::write(&p, report.to_csv()).map_err(|e| Error::Io { path: p, source: e })?;
            }
        }
    }
    Ok(())
}
