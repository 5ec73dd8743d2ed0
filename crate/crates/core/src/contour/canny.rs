//! Canny edge detection with an extra depth gate before hysteresis.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::maps::{AmplitudeMap, EdgeMask, IntensityGradientMap};
use crate::error::{Error, Result};
use crate::imgcore::{FloatMap, GrayImage, PipelineConfig};

/// Support radius of the Gaussian kernel (5x5).
pub const GAUSS_RADIUS: usize = 2;

/// Sobel responses of the blurred frame and their frame-normalized magnitude.
#[derive(Debug, Clone)]
pub struct CannyGradients {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<f32>,
    pub gy: Vec<f32>,
    /// Magnitude divided by its frame maximum, in `[0, 1]`.
    pub magnitude: Vec<f32>,
}

fn gaussian_kernel(sigma: f64) -> [f32; 2 * GAUSS_RADIUS + 1] {
    let mut k = [0.0f32; 2 * GAUSS_RADIUS + 1];
    let mut sum = 0.0f64;
    let mut raw = [0.0f64; 2 * GAUSS_RADIUS + 1];
    for (i, r) in raw.iter_mut().enumerate() {
        let d = i as f64 - GAUSS_RADIUS as f64;
        *r = (-d * d / (2.0 * sigma * sigma)).exp();
        sum += *r;
    }
    for (o, r) in k.iter_mut().zip(raw) {
        *o = (r / sum) as f32;
    }
    k
}

/// Separable 5x5 Gaussian blur with clamped borders.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Vec<f32> {
    let (w, h) = img.dims();
    let k = gaussian_kernel(sigma);
    let r = GAUSS_RADIUS as isize;
    let mut tmp = vec![0.0f32; w * h];
    tmp.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            *o = (-r..=r)
                .map(|d| k[(d + r) as usize] * img.get_clamped(x as isize + d, y as isize))
                .sum();
        }
    });
    let mut out = vec![0.0f32; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            *o = (-r..=r)
                .map(|d| {
                    let yy = (y as isize + d).clamp(0, h as isize - 1) as usize;
                    k[(d + r) as usize] * tmp[yy * w + x]
                })
                .sum();
        }
    });
    out
}

pub fn canny_gradients(img: &GrayImage, sigma: f64) -> CannyGradients {
    let (w, h) = img.dims();
    sobel_gradients(&gaussian_blur(img, sigma), w, h)
}

/// Sobel step on an already blurred `width x height` buffer, clamped borders.
pub fn sobel_gradients(blurred: &[f32], w: usize, h: usize) -> CannyGradients {
    assert_eq!(blurred.len(), w * h, "buffer does not match dimensions");
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        let y = y.clamp(0, h as isize - 1) as usize;
        blurred[y * w + x]
    };
    let mut gx = vec![0.0f32; w * h];
    let mut gy = vec![0.0f32; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    let raw: Vec<f32> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let max = raw.iter().copied().fold(0.0f32, f32::max);
    let magnitude = if max > 0.0 {
        raw.iter().map(|&m| (m / max).min(1.0)).collect()
    } else {
        raw
    };
    CannyGradients {
        width: w,
        height: h,
        gx,
        gy,
        magnitude,
    }
}

/// Neighbour offsets along the gradient, quantized to 0/45/90/135 degrees.
fn gradient_step(gx: f32, gy: f32) -> (isize, isize) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (1, 0)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (0, 1)
    } else {
        (-1, 1)
    }
}

/// Pixels that are local maxima along their gradient direction.
///
/// Equal neighbours do not suppress; neighbours outside the frame count as zero.
pub fn non_maximum_suppression(g: &CannyGradients) -> Vec<bool> {
    let (w, h) = (g.width as isize, g.height as isize);
    let mag = |x: isize, y: isize| {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            g.magnitude[(y * w + x) as usize]
        }
    };
    (0..g.width * g.height)
        .map(|i| {
            let (x, y) = ((i % g.width) as isize, (i / g.width) as isize);
            let m = g.magnitude[i];
            if m <= 0.0 {
                return false;
            }
            let (dx, dy) = gradient_step(g.gx[i], g.gy[i]);
            m >= mag(x + dx, y + dy) && m >= mag(x - dx, y - dy)
        })
        .collect()
}

/// Hysteresis over NMS survivors after dropping pixels outside the depth-contour filter.
///
/// A candidate passes the depth gate when the quarter-scale fused amplitude at
/// `(x/2, y/2)` is at least `t_depth`. Survivors above `t_high` seed contours;
/// those in `[t_low, t_high]` join when 8-connected to a contour pixel.
pub fn depth_gated_hysteresis(
    magnitude: &[f32],
    candidates: &[bool],
    width: usize,
    height: usize,
    m_fuse_norm: &AmplitudeMap,
    cfg: &PipelineConfig,
) -> Result<EdgeMask> {
    if magnitude.len() != width * height || candidates.len() != width * height {
        return Err(Error::Dimension("gradient buffers do not match frame size".into()));
    }
    check_quarter(width, height, m_fuse_norm)?;
    let (t_low, t_high, t_depth) = (cfg.t_low as f32, cfg.t_high as f32, cfg.t_depth as f32);
    let gated: Vec<bool> = (0..width * height)
        .map(|i| candidates[i] && m_fuse_norm.at_full_res(i % width, i / width) >= t_depth)
        .collect();
    let mut edge = vec![false; width * height];
    let mut queue = VecDeque::new();
    for i in 0..width * height {
        if gated[i] && magnitude[i] > t_high {
            edge[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % width) as isize, (i / width) as isize);
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                let j = ny as usize * width + nx as usize;
                if !edge[j] && gated[j] && magnitude[j] >= t_low {
                    edge[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    EdgeMask::new(width, height, edge)
}

fn check_quarter(width: usize, height: usize, m: &AmplitudeMap) -> Result<()> {
    if m.width() != width / 2 || m.height() != height / 2 || m.width() == 0 || m.height() == 0 {
        return Err(Error::Dimension(format!(
            "depth-contour filter {:?} is not the quarter-scale grid of {width}x{height}",
            m.dims()
        )));
    }
    Ok(())
}

/// Depth contours of a full-resolution frame and the normalized intensity gradient.
pub fn extract_depth_contours(
    gray_full: &GrayImage,
    m_fuse_norm: &AmplitudeMap,
    cfg: &PipelineConfig,
) -> Result<(EdgeMask, IntensityGradientMap)> {
    let (w, h) = gray_full.dims();
    check_quarter(w, h, m_fuse_norm)?;
    let g = canny_gradients(gray_full, cfg.gauss_sigma);
    let nms = non_maximum_suppression(&g);
    let mask = depth_gated_hysteresis(&g.magnitude, &nms, w, h, m_fuse_norm, cfg)?;
    let m_i = IntensityGradientMap::new(FloatMap::new(w, h, g.magnitude)?)?;
    Ok((mask, m_i))
}
