//! Dense inverse search: coarse-to-fine patch alignment with per-pixel blending.

use rayon::prelude::*;

use super::FlowField;
use crate::error::{Error, Result};
use crate::imgcore::{build_pyramid, GrayImage, PipelineConfig};

/// Patch-level search parameters (all in pixels of the current level).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisParams {
    pub patch_size: usize,
    pub stride: usize,
    pub iterations: usize,
    pub min_level_dim: usize,
}

impl DisParams {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        Self {
            patch_size: cfg.flow_patch_size,
            stride: cfg.flow_patch_stride,
            iterations: cfg.flow_iterations,
            min_level_dim: cfg.flow_min_level_dim,
        }
    }
}

impl Default for DisParams {
    fn default() -> Self {
        Self::from_config(&PipelineConfig::default())
    }
}

/// Number of pyramid levels whose coarsest side still reaches `min_level_dim`.
pub fn pyramid_depth(width: usize, height: usize, min_level_dim: usize) -> usize {
    let mut levels = 1;
    let mut side = width.min(height);
    while side / 2 >= min_level_dim {
        side /= 2;
        levels += 1;
    }
    levels
}

/// Flow from `from` to `to`: `to(x + flow(x)) ≈ from(x)`.
pub fn compute_flow(from: &GrayImage, to: &GrayImage, cfg: &PipelineConfig) -> Result<FlowField> {
    compute_flow_with(from, to, &DisParams::from_config(cfg))
}

pub fn compute_flow_with(from: &GrayImage, to: &GrayImage, params: &DisParams) -> Result<FlowField> {
    if from.dims() != to.dims() {
        return Err(Error::Dimension(format!(
            "flow endpoints differ in size: {:?} vs {:?}",
            from.dims(),
            to.dims()
        )));
    }
    let (w, h) = from.dims();
    if w.min(h) < params.patch_size {
        return Err(Error::Dimension(format!(
            "{w}x{h} frame is smaller than the {}px flow patch",
            params.patch_size
        )));
    }
    let levels = pyramid_depth(w, h, params.min_level_dim.max(params.patch_size));
    let pyr_from = build_pyramid(from, levels)?;
    let pyr_to = build_pyramid(to, levels)?;

    let mut flow: Option<FlowField> = None;
    for level in (0..levels).rev() {
        let (f, t) = (&pyr_from[level], &pyr_to[level]);
        let init = match flow {
            None => FlowField::zeros(f.width(), f.height()),
            Some(coarse) => upsample_flow(&coarse, f.width(), f.height()),
        };
        flow = Some(refine_level(f, t, &init, params));
    }
    Ok(flow.expect("at least one level"))
}

/// Doubles resolution and magnitude of a coarser field.
fn upsample_flow(coarse: &FlowField, width: usize, height: usize) -> FlowField {
    FlowField::from_fn(width, height, |x, y| {
        let cx = (x as f32 + 0.5) * 0.5 - 0.5;
        let cy = (y as f32 + 0.5) * 0.5 - 0.5;
        let [u, v] = coarse.sample_bilinear(cx, cy);
        [2.0 * u, 2.0 * v]
    })
}

/// Top-left corners covering `[0, len)` with the last patch flush to the border.
fn patch_origins(len: usize, patch: usize, stride: usize) -> Vec<usize> {
    let last = len - patch;
    let mut out: Vec<usize> = (0..=last).step_by(stride).collect();
    if *out.last().expect("len >= patch") != last {
        out.push(last);
    }
    out
}

struct PatchFit {
    x0: usize,
    y0: usize,
    uv: [f32; 2],
}

fn refine_level(from: &GrayImage, to: &GrayImage, init: &FlowField, params: &DisParams) -> FlowField {
    let (w, h) = from.dims();
    let p = params.patch_size;
    let gx: Vec<f32> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            0.5 * (from.get_clamped(x + 1, y) - from.get_clamped(x - 1, y))
        })
        .collect();
    let gy: Vec<f32> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            0.5 * (from.get_clamped(x, y + 1) - from.get_clamped(x, y - 1))
        })
        .collect();

    let xs = patch_origins(w, p, params.stride);
    let ys = patch_origins(h, p, params.stride);
    let corners: Vec<(usize, usize)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();

    let fits: Vec<PatchFit> = corners
        .par_iter()
        .map(|&(x0, y0)| {
            let centre = (x0 as f32 + (p as f32 - 1.0) * 0.5, y0 as f32 + (p as f32 - 1.0) * 0.5);
            let start = init.sample_bilinear(centre.0, centre.1);
            let uv = fit_patch(from, to, &gx, &gy, x0, y0, start, params);
            PatchFit { x0, y0, uv }
        })
        .collect();

    // Blend overlapping patches, weighting each by its photometric residual.
    let mut acc = vec![[0.0f64; 3]; w * h];
    for fit in &fits {
        for y in fit.y0..fit.y0 + p {
            for x in fit.x0..fit.x0 + p {
                let warped = to.sample_bilinear(x as f32 + fit.uv[0], y as f32 + fit.uv[1]);
                let residual = 255.0 * (warped - from.get(x, y)).abs();
                let weight = 1.0 / residual.max(1.0) as f64;
                let a = &mut acc[y * w + x];
                a[0] += weight * fit.uv[0] as f64;
                a[1] += weight * fit.uv[1] as f64;
                a[2] += weight;
            }
        }
    }
    FlowField::from_fn(w, h, |x, y| {
        let a = acc[y * w + x];
        debug_assert!(a[2] > 0.0, "patch grid covers every pixel");
        [(a[0] / a[2]) as f32, (a[1] / a[2]) as f32]
    })
}

fn patch_ssd(from: &GrayImage, to: &GrayImage, x0: usize, y0: usize, p: usize, uv: [f32; 2]) -> f32 {
    let mut ssd = 0.0;
    for y in y0..y0 + p {
        for x in x0..x0 + p {
            let e = to.sample_bilinear(x as f32 + uv[0], y as f32 + uv[1]) - from.get(x, y);
            ssd += e * e;
        }
    }
    ssd
}

/// Inverse-compositional Gauss-Newton search for one translational patch.
#[allow(clippy::too_many_arguments)]
fn fit_patch(
    from: &GrayImage,
    to: &GrayImage,
    gx: &[f32],
    gy: &[f32],
    x0: usize,
    y0: usize,
    start: [f32; 2],
    params: &DisParams,
) -> [f32; 2] {
    let w = from.width();
    let p = params.patch_size;
    let (mut hxx, mut hxy, mut hyy) = (0.0f64, 0.0f64, 0.0f64);
    for y in y0..y0 + p {
        for x in x0..x0 + p {
            let (a, b) = (gx[y * w + x] as f64, gy[y * w + x] as f64);
            hxx += a * a;
            hxy += a * b;
            hyy += b * b;
        }
    }
    let det = hxx * hyy - hxy * hxy;
    if det <= 1e-12 * (hxx + hyy).max(1e-12).powi(2) || det <= 1e-14 {
        return start;
    }
    let mut uv = start;
    for _ in 0..params.iterations {
        let (mut bx, mut by) = (0.0f64, 0.0f64);
        for y in y0..y0 + p {
            for x in x0..x0 + p {
                let e = (to.sample_bilinear(x as f32 + uv[0], y as f32 + uv[1]) - from.get(x, y)) as f64;
                bx += gx[y * w + x] as f64 * e;
                by += gy[y * w + x] as f64 * e;
            }
        }
        let du = (hyy * bx - hxy * by) / det;
        let dv = (hxx * by - hxy * bx) / det;
        uv[0] -= du as f32;
        uv[1] -= dv as f32;
        if du * du + dv * dv < 1e-6 {
            break;
        }
    }
    let drift = ((uv[0] - start[0]).powi(2) + (uv[1] - start[1]).powi(2)).sqrt();
    if !(uv[0].is_finite() && uv[1].is_finite())
        || drift > p as f32
        || patch_ssd(from, to, x0, y0, p, uv) > patch_ssd(from, to, x0, y0, p, start)
    {
        return start;
    }
    uv
}
