//! Random frames for the real/virtual depth test.

use dco_core::occlude::VirtualLayer;
use dco_core::{ColorImage, FloatMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Frame {
    pub real: ColorImage,
    pub real_depth: FloatMap,
    pub virt: VirtualLayer,
}

/// Depths on a coarse grid (ties frequent), ~1/3 of virtual pixels empty,
/// ~1/10 of real depths nodata.
pub fn random_frame(w: usize, h: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real = ColorImage::from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()]);
    let real_depth = FloatMap::from_fn(w, h, |_, _| {
        if rng.gen_bool(0.1) { f32::NAN } else { rng.gen_range(1..8) as f32 * 0.5 }
    });
    let vcol = ColorImage::from_fn(w, h, |_, _| [rng.gen(), rng.gen(), rng.gen()]);
    let vdepth = FloatMap::from_fn(w, h, |_, _| {
        if rng.gen_bool(0.33) { f32::NAN } else { rng.gen_range(1..8) as f32 * 0.5 }
    });
    Frame { real, real_depth, virt: VirtualLayer::new(vcol, vdepth).unwrap() }
}

/// The three-case rule, pixel by pixel.
pub fn expected(f: &Frame, x: usize, y: usize) -> ([f32; 3], bool) {
    let real = f.real.pixel(x, y);
    match f.virt.depth().value(x, y) {
        None => (real, false),
        Some(zv) => match f.real_depth.value(x, y) {
            Some(zr) if zv > zr => (real, false),
            _ => (f.virt.color().pixel(x, y), true),
        },
    }
}
