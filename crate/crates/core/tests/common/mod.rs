#![allow(dead_code)]

use dco_core::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Periodic value-noise texture: random lattice every `cell` pixels, bilinear in between.
pub fn periodic_texture(width: usize, height: usize, cell: usize, seed: u64) -> GrayImage {
    assert!(width.is_multiple_of(cell) && height.is_multiple_of(cell));
    let (lw, lh) = (width / cell, height / cell);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice: Vec<f32> = (0..lw * lh).map(|_| rng.gen_range(0.05..0.95)).collect();
    GrayImage::from_fn(width, height, |x, y| {
        let (gx, gy) = (x / cell, y / cell);
        let (fx, fy) = ((x % cell) as f32 / cell as f32, (y % cell) as f32 / cell as f32);
        let at = |i: usize, j: usize| lattice[(j % lh) * lw + (i % lw)];
        let top = at(gx, gy) * (1.0 - fx) + at(gx + 1, gy) * fx;
        let bot = at(gx, gy + 1) * (1.0 - fx) + at(gx + 1, gy + 1) * fx;
        top * (1.0 - fy) + bot * fy
    })
}

/// `out(x, y) = img(x - dx, y - dy)` with wraparound, i.e. content moves by `(dx, dy)`.
pub fn translate_wrap(img: &GrayImage, dx: isize, dy: isize) -> GrayImage {
    let (w, h) = (img.width() as isize, img.height() as isize);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        img.get(
            (x as isize - dx).rem_euclid(w) as usize,
            (y as isize - dy).rem_euclid(h) as usize,
        )
    })
}

pub fn median(mut v: Vec<f32>) -> f32 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

pub mod densify_oracle;
pub mod composite_oracle;
pub mod fusion_oracle;
pub mod stereo_oracle;
