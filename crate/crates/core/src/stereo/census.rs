use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imgcore::GrayImage;

/// Census descriptors, one bit per neighbour (row-major, centre skipped).
///
/// Bit `k` (least significant first) is set iff neighbour `k` is darker
/// than the centre. Coordinates outside the image are clamped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusMap {
    width: usize,
    height: usize,
    bit_len: u32,
    bits: Vec<u64>,
}

impl CensusMap {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// Descriptor length in bits (`w*h - 1`).
    #[inline]
    pub fn bit_len(&self) -> u32 {
        self.bit_len
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.bits[y * self.width + x]
    }
}

#[inline]
pub fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

pub fn census_transform(img: &GrayImage, window: (usize, usize)) -> Result<CensusMap> {
    let (ww, wh) = window;
    if ww % 2 == 0 || wh % 2 == 0 || ww == 0 || wh == 0 {
        return Err(Error::Config(format!("census window {ww}x{wh} must have odd dimensions")));
    }
    if ww * wh - 1 > 64 {
        return Err(Error::Config(format!("census window {ww}x{wh} exceeds 64 bits")));
    }
    let (w, h) = img.dims();
    let (rx, ry) = ((ww / 2) as isize, (wh / 2) as isize);
    let mut bits = vec![0u64; w * h];
    bits.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            let center = img.get(x, y);
            let mut code = 0u64;
            let mut k = 0;
            for dy in -ry..=ry {
                for dx in -rx..=rx {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    if img.get_clamped(x as isize + dx, y as isize + dy) < center {
                        code |= 1 << k;
                    }
                    k += 1;
                }
            }
            *out = code;
        }
    });
    Ok(CensusMap {
        width: w,
        height: h,
        bit_len: (ww * wh - 1) as u32,
        bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_is_all_zero() {
        let c = census_transform(&GrayImage::filled(12, 9, 0.6), (9, 7)).unwrap();
        assert_eq!(c.bit_len(), 62);
        assert!((0..9).all(|y| (0..12).all(|x| c.get(x, y) == 0)));
    }

    #[test]
    fn bright_center_sets_every_bit() {
        let img = GrayImage::from_fn(3, 3, |x, y| if (x, y) == (1, 1) { 1.0 } else { 0.0 });
        let c = census_transform(&img, (3, 3)).unwrap();
        assert_eq!(c.get(1, 1), 0xff);
        assert_eq!(c.get(1, 1).count_ones(), 8);
    }

    #[test]
    fn bit_order_is_row_major() {
        // only the top-left neighbour is darker -> bit 0; bottom-right -> bit 7
        let img = GrayImage::new(3, 3, vec![0.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.2]).unwrap();
        let c = census_transform(&img, (3, 3)).unwrap();
        assert_eq!(c.get(1, 1), 0b1000_0001);
    }

    #[test]
    fn self_distance_is_zero() {
        let img = GrayImage::from_fn(10, 8, |x, y| ((x * 7 + y * 13) % 11) as f32 / 10.0);
        let a = census_transform(&img, (5, 3)).unwrap();
        let b = census_transform(&img, (5, 3)).unwrap();
        for y in 0..8 {
            for x in 0..10 {
                assert_eq!(hamming(a.get(x, y), b.get(x, y)), 0);
            }
        }
    }

    #[test]
    fn even_window_rejected() {
        let img = GrayImage::filled(4, 4, 0.0);
        assert!(matches!(census_transform(&img, (4, 3)), Err(Error::Config(_))));
        assert!(matches!(census_transform(&img, (9, 9)), Err(Error::Config(_))));
    }
}
