use rayon::prelude::*;

use crate::imgcore::{GrayImage, PipelineConfig};

/// Arm lengths of one pixel's cross-shaped support, in pixels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Arms {
    pub left: u16,
    pub right: u16,
    pub up: u16,
    pub down: u16,
}

impl Arms {
    /// Shortest of the four arms.
    #[inline]
    pub fn min_len(&self) -> u16 {
        self.left.min(self.right).min(self.up).min(self.down)
    }
}

/// Per-pixel adaptive cross-support arms.
///
/// The support region of `p` is the union of the horizontal spans of every
/// pixel on `p`'s vertical arm (including `p`).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossWindowField {
    width: usize,
    height: usize,
    arms: Vec<Arms>,
}

impl CrossWindowField {
    /// Wraps arms, clamping each one so no arm leaves the image.
    pub fn from_arms(width: usize, height: usize, mut arms: Vec<Arms>) -> Self {
        assert_eq!(arms.len(), width * height, "arm count must match dimensions");
        for y in 0..height {
            for x in 0..width {
                let a = &mut arms[y * width + x];
                a.left = a.left.min(x as u16);
                a.right = a.right.min((width - 1 - x) as u16);
                a.up = a.up.min(y as u16);
                a.down = a.down.min((height - 1 - y) as u16);
            }
        }
        Self { width, height, arms }
    }

    /// Every arm zero: each region is the pixel itself.
    pub fn degenerate(width: usize, height: usize) -> Self {
        Self::from_arms(width, height, vec![Arms::default(); width * height])
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
    pub fn arms(&self, x: usize, y: usize) -> Arms {
        self.arms[y * self.width + x]
    }

    #[inline]
    pub fn min_arm(&self, x: usize, y: usize) -> u16 {
        self.arms(x, y).min_len()
    }

    /// Rows of the support region as `(row, first_col, last_col)`, inclusive.
    pub fn region_rows(&self, x: usize, y: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let a = self.arms(x, y);
        (y - a.up as usize..=y + a.down as usize).map(move |yy| {
            let h = self.arms(x, yy);
            (yy, x - h.left as usize, x + h.right as usize)
        })
    }

    /// Number of pixels in the support region.
    pub fn region_size(&self, x: usize, y: usize) -> usize {
        self.region_rows(x, y).map(|(_, a, b)| b - a + 1).sum()
    }
}

/// Builds the cross arms of the quarter-scale left view.
///
/// An arm grows while the luminance difference to the anchor stays below
/// `cross_color_tau` (below `cross_color_tau2` once longer than
/// `cross_arm_l2`) and its length stays within `cross_arm_l1`. Each arm
/// channel is then smoothed with a 3x3 median, capped by the raw arm so the
/// smoothing only trims spikes and never carries an arm across a colour break.
pub fn build_cross_windows(img: &GrayImage, cfg: &PipelineConfig) -> CrossWindowField {
    let (w, h) = img.dims();
    let tau1 = cfg.cross_color_tau as f32;
    let tau2 = cfg.cross_color_tau2 as f32;
    let l1 = cfg.cross_arm_l1.min(u16::MAX as usize);
    let l2 = cfg.cross_arm_l2;

    let grow = |x: usize, y: usize, dx: isize, dy: isize| -> u16 {
        let center = img.get(x, y);
        let mut len = 0usize;
        while len < l1 {
            let step = len as isize + 1;
            let qx = x as isize + dx * step;
            let qy = y as isize + dy * step;
            if qx < 0 || qy < 0 || qx >= w as isize || qy >= h as isize {
                break;
            }
            let diff = (img.get(qx as usize, qy as usize) - center).abs();
            if diff >= tau1 || (step as usize > l2 && diff >= tau2) {
                break;
            }
            len += 1;
        }
        len as u16
    };

    let mut raw = vec![Arms::default(); w * h];
    raw.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, a) in row.iter_mut().enumerate() {
            *a = Arms {
                left: grow(x, y, -1, 0),
                right: grow(x, y, 1, 0),
                up: grow(x, y, 0, -1),
                down: grow(x, y, 0, 1),
            };
        }
    });

    let mut smoothed = vec![Arms::default(); w * h];
    smoothed.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let mut bufs = [[0u16; 9]; 4];
            let mut n = 0;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let sx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    let sy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                    let a = raw[sy * w + sx];
                    bufs[0][n] = a.left;
                    bufs[1][n] = a.right;
                    bufs[2][n] = a.up;
                    bufs[3][n] = a.down;
                    n += 1;
                }
            }
            let med = |b: &mut [u16; 9]| {
                b.sort_unstable();
                b[4]
            };
            let own = raw[y * w + x];
            *out = Arms {
                left: med(&mut bufs[0]).min(own.left),
                right: med(&mut bufs[1]).min(own.right),
                up: med(&mut bufs[2]).min(own.up),
                down: med(&mut bufs[3]).min(own.down),
            };
        }
    });
    CrossWindowField::from_arms(w, h, smoothed)
}
