#![allow(dead_code)]

use dco_cli::pipeline::{FrameOutput, LoadedFrame, Pipeline};
use dco_cli::synth::{render_scene, SceneSpec, SynthFrame};
use dco_core::contour::EdgeMask;
use dco_core::occlude::TriangleMesh;
use dco_core::PipelineConfig;

pub fn loaded(frames: &[SynthFrame]) -> Vec<LoadedFrame> {
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| LoadedFrame::from_gray(i as u64, f.left.clone(), f.right.clone(), None))
        .collect()
}

pub fn run_all(cfg: &PipelineConfig, frames: Vec<LoadedFrame>, mesh: Option<TriangleMesh>) -> Vec<FrameOutput> {
    let mut p = Pipeline::new(cfg.clone(), mesh).unwrap();
    let mut out = Vec::new();
    for f in frames {
        out.extend(p.push(f).unwrap());
    }
    out.extend(p.finish());
    out
}

/// Cube centred on the square's `edge` ("left" or "right") at frame `t`,
/// halfway between the two scene depths.
pub fn straddling_cube(spec: &SceneSpec, t: usize, right_edge: bool) -> TriangleMesh {
    let (sx, sy) = spec.square_at(t);
    let s = spec.square_size as f64;
    let u = if right_edge { sx as f64 + s - 0.5 } else { sx as f64 - 0.5 };
    let v = sy as f64 + s / 2.0;
    let z = 0.5 * (spec.z_fg + spec.z_bg);
    let cx = (u - (spec.width as f64 - 1.0) / 2.0) * z / spec.focal_px;
    let cy = (v - (spec.height as f64 - 1.0) / 2.0) * z / spec.focal_px;
    TriangleMesh::cube([cx, cy, z], 0.2 * (spec.z_bg - spec.z_fg), [0.9, 0.2, 0.1]).unwrap()
}

/// Pixels of `m` with a 4-neighbour outside `m` (image border counts as outside).
pub fn boundary(m: &EdgeMask) -> Vec<(usize, usize)> {
    let (w, h) = m.dims();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !m.get(x, y) {
                continue;
            }
            let outside = x == 0 || y == 0 || x + 1 == w || y + 1 == h
                || !m.get(x - 1, y) || !m.get(x + 1, y) || !m.get(x, y - 1) || !m.get(x, y + 1);
            if outside {
                out.push((x, y));
            }
        }
    }
    out
}

/// Fraction of `got`'s boundary pixels within Chebyshev distance `tol` of `want`'s boundary.
pub fn boundary_agreement(got: &EdgeMask, want: &EdgeMask, tol: usize) -> f64 {
    let (w, h) = want.dims();
    let mut near = vec![false; w * h];
    for (x, y) in boundary(want) {
        for yy in y.saturating_sub(tol)..=(y + tol).min(h - 1) {
            for xx in x.saturating_sub(tol)..=(x + tol).min(w - 1) {
                near[yy * w + xx] = true;
            }
        }
    }
    let b = boundary(got);
    if b.is_empty() {
        return 0.0;
    }
    b.iter().filter(|&&(x, y)| near[y * w + x]).count() as f64 / b.len() as f64
}

pub fn iou(a: &EdgeMask, b: &EdgeMask) -> f64 {
    let (mut i, mut u) = (0usize, 0usize);
    for (&p, &q) in a.data().iter().zip(b.data()) {
        i += (p && q) as usize;
        u += (p || q) as usize;
    }
    if u == 0 { 1.0 } else { i as f64 / u as f64 }
}

pub fn default_scene() -> (SceneSpec, Vec<SynthFrame>) {
    let spec = SceneSpec::default();
    let frames = render_scene(&spec).unwrap();
    (spec, frames)
}
