use rayon::prelude::*;

use super::census::{census_transform, hamming};
use super::cross::CrossWindowField;
use crate::error::{Error, Result};
use crate::imgcore::{GrayImage, PipelineConfig};

/// Cost assigned when the candidate match falls outside the right image.
pub const OUT_OF_RANGE_COST: f32 = 2.0;

/// Matching costs for every pixel and every disparity in `[d_min, d_max]`.
///
/// Stored disparity-major: one contiguous `width*height` slice per disparity.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume {
    width: usize,
    height: usize,
    d_min: i32,
    d_max: i32,
    cost: Vec<f32>,
}

impl CostVolume {
    /// `slices[d - d_min]` holds the row-major cost image for disparity `d`.
    pub fn from_slices(width: usize, height: usize, d_min: i32, d_max: i32, cost: Vec<f32>) -> Result<Self> {
        if d_min > d_max {
            return Err(Error::Input(format!("empty disparity range [{d_min}, {d_max}]")));
        }
        let nd = (d_max - d_min + 1) as usize;
        if cost.len() != nd * width * height {
            return Err(Error::Dimension(format!(
                "cost volume {width}x{height}x{nd} needs {} values, got {}",
                nd * width * height,
                cost.len()
            )));
        }
        if cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("cost volume contains non-finite values".into()));
        }
        Ok(Self {
            width,
            height,
            d_min,
            d_max,
            cost,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn d_min(&self) -> i32 {
        self.d_min
    }

    #[inline]
    pub fn d_max(&self) -> i32 {
        self.d_max
    }

    #[inline]
    pub fn disparity_count(&self) -> usize {
        (self.d_max - self.d_min + 1) as usize
    }

    #[inline]
    pub fn cost(&self, x: usize, y: usize, d: i32) -> f32 {
        let k = (d - self.d_min) as usize;
        self.cost[k * self.width * self.height + y * self.width + x]
    }

    pub fn slice(&self, d: i32) -> &[f32] {
        let n = self.width * self.height;
        let k = (d - self.d_min) as usize;
        &self.cost[k * n..(k + 1) * n]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.cost
    }
}

/// Weight of the absolute-difference term given the shortest support arm.
///
/// Strictly decreasing in `l_min`: weakly textured regions (long arms) lean
/// on the census term.
#[inline]
pub fn ad_census_alpha(l_min: f64, gamma_l: f64, epsilon: f64) -> f64 {
    1.0 - (-gamma_l / (l_min + epsilon)).exp()
}

/// Combined robust cost; `c_ad` on the 0..255 intensity scale, `c_census` in bits.
#[inline]
pub fn ad_census_cost(c_ad: f64, c_census: f64, alpha: f64, lambda_ad: f64, lambda_census: f64) -> f64 {
    alpha * (1.0 - (-c_ad / lambda_ad).exp()) + (1.0 - alpha) * (1.0 - (-c_census / lambda_census).exp())
}

/// Raw AD-census costs; the candidate for disparity `d` at `(x, y)` is `(x - d, y)`.
pub fn compute_cost_volume(
    left: &GrayImage,
    right: &GrayImage,
    windows: &CrossWindowField,
    cfg: &PipelineConfig,
) -> Result<CostVolume> {
    let (w, h) = left.dims();
    if right.dims() != (w, h) || (windows.width(), windows.height()) != (w, h) {
        return Err(Error::Dimension(format!(
            "left {:?}, right {:?} and windows {:?} must share dimensions",
            left.dims(),
            right.dims(),
            (windows.width(), windows.height())
        )));
    }
    if cfg.d_min > cfg.d_max {
        return Err(Error::Config("d_min must not exceed d_max".into()));
    }
    let census_l = census_transform(left, cfg.census_window)?;
    let census_r = census_transform(right, cfg.census_window)?;
    let nd = (cfg.d_max - cfg.d_min + 1) as usize;
    let n = w * h;

    let alpha: Vec<f64> = (0..n)
        .map(|i| ad_census_alpha(windows.min_arm(i % w, i / w) as f64, cfg.gamma_l, cfg.epsilon))
        .collect();

    let mut cost = vec![0.0f32; nd * n];
    cost.par_chunks_mut(n).enumerate().for_each(|(k, slice)| {
        let d = cfg.d_min + k as i32;
        for y in 0..h {
            for x in 0..w {
                let qx = x as i64 - d as i64;
                slice[y * w + x] = if qx < 0 || qx >= w as i64 {
                    OUT_OF_RANGE_COST
                } else {
                    let qx = qx as usize;
                    let c_ad = 255.0 * (left.get(x, y) - right.get(qx, y)).abs() as f64;
                    let c_census = hamming(census_l.get(x, y), census_r.get(qx, y)) as f64;
                    ad_census_cost(c_ad, c_census, alpha[y * w + x], cfg.lambda_ad, cfg.lambda_census) as f32
                };
            }
        }
    });
    CostVolume::from_slices(w, h, cfg.d_min, cfg.d_max, cost)
}

/// Averages each disparity slice over every pixel's cross-support region.
pub fn aggregate_costs(vol: &CostVolume, windows: &CrossWindowField) -> Result<CostVolume> {
    let (w, h) = (vol.width, vol.height);
    if (windows.width(), windows.height()) != (w, h) {
        return Err(Error::Dimension("cross windows and cost volume differ in size".into()));
    }
    let n = w * h;
    let counts: Vec<f64> = (0..n)
        .map(|i| windows.region_size(i % w, i / w) as f64)
        .collect();
    let mut out = vec![0.0f32; vol.cost.len()];
    out.par_chunks_mut(n)
        .zip(vol.cost.par_chunks(n))
        .for_each(|(dst, src)| {
            // row prefix sums: prefix[y*(w+1) + x] = sum of src[y][0..x]
            let mut prefix = vec![0.0f64; h * (w + 1)];
            for y in 0..h {
                let row = &src[y * w..(y + 1) * w];
                let pre = &mut prefix[y * (w + 1)..(y + 1) * (w + 1)];
                for x in 0..w {
                    pre[x + 1] = pre[x] + row[x] as f64;
                }
            }
            for y in 0..h {
                for x in 0..w {
                    let sum: f64 = windows
                        .region_rows(x, y)
                        .map(|(yy, a, b)| prefix[yy * (w + 1) + b + 1] - prefix[yy * (w + 1) + a])
                        .sum();
                    dst[y * w + x] = (sum / counts[y * w + x]) as f32;
                }
            }
        });
    CostVolume::from_slices(w, h, vol.d_min, vol.d_max, out)
}
