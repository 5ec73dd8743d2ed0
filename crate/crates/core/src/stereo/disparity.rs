use rayon::prelude::*;

use super::cost::CostVolume;
use super::cross::CrossWindowField;
use crate::error::{Error, Result};
use crate::imgcore::FloatMap;

/// Integer disparities in quarter-scale pixels; `None` marks rejected pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    d_min: i32,
    d_max: i32,
    data: Vec<Option<i32>>,
}

impl DisparityMap {
    pub fn new(width: usize, height: usize, d_min: i32, d_max: i32, data: Vec<Option<i32>>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "disparity map {width}x{height} needs {} entries, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(d) = data.iter().flatten().find(|d| !(d_min..=d_max).contains(*d)) {
            return Err(Error::Input(format!("disparity {d} outside [{d_min}, {d_max}]")));
        }
        Ok(Self {
            width,
            height,
            d_min,
            d_max,
            data,
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
    pub fn get(&self, x: usize, y: usize) -> Option<i32> {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[Option<i32>] {
        &self.data
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().flatten().count()
    }

    pub fn to_float_map(&self) -> FloatMap {
        FloatMap::from_fn(self.width, self.height, |x, y| {
            self.get(x, y).map_or(FloatMap::NODATA, |d| d as f32)
        })
    }
}

/// Winner-takes-all: lowest cost per pixel, ties resolved to the smaller disparity.
pub fn select_disparity_wta(vol: &CostVolume) -> DisparityMap {
    let (w, h) = (vol.width(), vol.height());
    let mut data = vec![None; w * h];
    data.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let mut best = vol.d_min();
            let mut best_cost = vol.cost(x, y, best);
            for d in vol.d_min() + 1..=vol.d_max() {
                let c = vol.cost(x, y, d);
                if c < best_cost {
                    best = d;
                    best_cost = c;
                }
            }
            *out = Some(best);
        }
    });
    DisparityMap {
        width: w,
        height: h,
        d_min: vol.d_min(),
        d_max: vol.d_max(),
        data,
    }
}

/// Smallest region that may reject its centre as an outlier.
pub const OUTLIER_MIN_REGION: usize = 4;

/// Replaces each disparity with the most frequent one inside its support region.
///
/// Each iteration reads only the previous iteration's map. Modes break ties
/// toward the smaller disparity. A pixel is rejected when its region holds no
/// valid disparity, or when the region has at least [`OUTLIER_MIN_REGION`]
/// pixels yet no disparity occurs twice.
pub fn refine_disparity_histogram(
    disp: &DisparityMap,
    windows: &CrossWindowField,
    iterations: usize,
) -> Result<DisparityMap> {
    let (w, h) = (disp.width, disp.height);
    if (windows.width(), windows.height()) != (w, h) {
        return Err(Error::Dimension("cross windows and disparity map differ in size".into()));
    }
    let nd = (disp.d_max - disp.d_min + 1) as usize;
    let mut current = disp.clone();
    for _ in 0..iterations {
        let prev = &current;
        let mut next = vec![None; w * h];
        next.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            let mut hist = vec![0u32; nd];
            let mut touched = Vec::new();
            for (x, out) in row.iter_mut().enumerate() {
                let mut region = 0usize;
                for (yy, a, b) in windows.region_rows(x, y) {
                    region += b - a + 1;
                    for xx in a..=b {
                        if let Some(d) = prev.get(xx, yy) {
                            let bin = (d - disp.d_min) as usize;
                            if hist[bin] == 0 {
                                touched.push(bin);
                            }
                            hist[bin] += 1;
                        }
                    }
                }
                let mut best: Option<(usize, u32)> = None;
                for &bin in &touched {
                    let c = hist[bin];
                    best = match best {
                        Some((b, bc)) if bc > c || (bc == c && b < bin) => Some((b, bc)),
                        _ => Some((bin, c)),
                    };
                }
                *out = match best {
                    Some((_, 1)) if region >= OUTLIER_MIN_REGION => None,
                    Some((bin, _)) => Some(disp.d_min + bin as i32),
                    None => None,
                };
                for &bin in &touched {
                    hist[bin] = 0;
                }
                touched.clear();
            }
        });
        current = DisparityMap {
            width: w,
            height: h,
            d_min: disp.d_min,
            d_max: disp.d_max,
            data: next,
        };
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::super::cross::Arms;
    use super::*;

    #[test]
    fn wta_argmin() {
        let vol = CostVolume::from_slices(1, 1, 0, 3, vec![0.9, 0.3, 0.5, 0.7]).unwrap();
        assert_eq!(select_disparity_wta(&vol).get(0, 0), Some(1));
    }

    #[test]
    fn wta_ties_take_d_min() {
        let vol = CostVolume::from_slices(1, 1, 2, 5, vec![0.4; 4]).unwrap();
        assert_eq!(select_disparity_wta(&vol).get(0, 0), Some(2));
    }

    fn row_window(len: usize, center: usize) -> CrossWindowField {
        let mut arms = vec![Arms::default(); len];
        arms[center] = Arms {
            left: center as u16,
            right: (len - 1 - center) as u16,
            up: 0,
            down: 0,
        };
        CrossWindowField::from_arms(len, 1, arms)
    }

    #[test]
    fn mode_of_neighbourhood() {
        let d = DisparityMap::new(5, 1, 0, 10, [5, 5, 7, 5, 9].map(Some).to_vec()).unwrap();
        let r = refine_disparity_histogram(&d, &row_window(5, 2), 1).unwrap();
        assert_eq!(r.get(2, 0), Some(5));
    }

    #[test]
    fn outlier_in_nine_pixel_region() {
        let mut data = vec![Some(12); 9];
        data[4] = Some(60);
        let d = DisparityMap::new(3, 3, 0, 64, data).unwrap();
        let mut arms = vec![Arms { left: 1, right: 1, up: 0, down: 0 }; 9];
        arms[4] = Arms { left: 1, right: 1, up: 1, down: 1 };
        let win = CrossWindowField::from_arms(3, 3, arms);
        assert_eq!(win.region_size(1, 1), 9);
        let r = refine_disparity_histogram(&d, &win, 1).unwrap();
        assert_eq!(r.get(1, 1), Some(12));
    }

    #[test]
    fn uniform_field_is_fixed_point() {
        let d = DisparityMap::new(6, 4, 0, 20, vec![Some(7); 24]).unwrap();
        let win = CrossWindowField::from_arms(6, 4, vec![Arms { left: 2, right: 2, up: 2, down: 2 }; 24]);
        assert_eq!(refine_disparity_histogram(&d, &win, 3).unwrap(), d);
    }

    #[test]
    fn all_distinct_region_is_rejected() {
        let d = DisparityMap::new(5, 1, 0, 10, [1, 2, 3, 4, 5].map(Some).to_vec()).unwrap();
        let r = refine_disparity_histogram(&d, &row_window(5, 2), 1).unwrap();
        assert_eq!(r.get(2, 0), None);
        // singleton regions keep their value
        assert_eq!(r.get(0, 0), Some(1));
    }

    #[test]
    fn constructor_checks_range() {
        assert!(DisparityMap::new(1, 1, 0, 4, vec![Some(5)]).is_err());
        assert!(DisparityMap::new(2, 1, 0, 4, vec![Some(1)]).is_err());
    }
}
