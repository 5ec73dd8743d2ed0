use rayon::prelude::*;

use super::render::VirtualLayer;
use crate::contour::EdgeMask;
use crate::densify::DenseDepthMap;
use crate::error::{Error, Result};
use crate::imgcore::{ColorImage, FloatMap};

/// Pixels where the virtual layer survives the depth test.
pub type OcclusionMask = EdgeMask;

/// Depth-tests the virtual layer against the solved real depth.
pub fn composite(real: &ColorImage, dense: &DenseDepthMap, virt: &VirtualLayer) -> Result<(ColorImage, OcclusionMask)> {
    composite_with_depth(real, dense.map(), virt)
}

/// Per-pixel rule: virtual shown iff it has geometry and its depth is not
/// strictly greater than the real depth. Nodata real depth counts as
/// infinitely far.
pub fn composite_with_depth(
    real: &ColorImage,
    real_depth: &FloatMap,
    virt: &VirtualLayer,
) -> Result<(ColorImage, OcclusionMask)> {
    if real.dims() != real_depth.dims() || real.dims() != virt.dims() {
        return Err(Error::Dimension(format!(
            "composite inputs differ: frame {:?}, depth {:?}, virtual {:?}",
            real.dims(),
            real_depth.dims(),
            virt.dims()
        )));
    }
    let (w, h) = real.dims();
    let shown: Vec<bool> = real_depth
        .data()
        .par_iter()
        .zip(virt.depth().data().par_iter())
        .map(|(&zr, &zv)| zv.is_finite() && (!zr.is_finite() || zv <= zr))
        .collect();
    let data: Vec<f32> = real
        .data()
        .par_chunks(3)
        .zip(virt.color().data().par_chunks(3))
        .zip(shown.par_iter())
        .flat_map_iter(|((r, v), &s)| if s { v } else { r }.to_vec())
        .collect();
    Ok((ColorImage::new(w, h, data)?, EdgeMask::new(w, h, shown)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(zr: f32, zv: f32) -> (ColorImage, OcclusionMask) {
        let real = ColorImage::filled(1, 1, [0.2; 3]);
        let virt = VirtualLayer::new(ColorImage::filled(1, 1, [0.9; 3]), FloatMap::filled(1, 1, zv)).unwrap();
        composite_with_depth(&real, &FloatMap::filled(1, 1, zr), &virt).unwrap()
    }

    #[test]
    fn three_case_rule() {
        assert_eq!(one(1.0, 0.5).0.pixel(0, 0), [0.9; 3]);
        assert!(one(1.0, 0.5).1.get(0, 0));
        let (c, m) = one(1.0, 2.0);
        assert_eq!((c.pixel(0, 0), m.get(0, 0)), ([0.2; 3], false));
        assert!(one(1.0, 1.0).1.get(0, 0));
        assert!(one(f32::NAN, 7.0).1.get(0, 0));
    }

    #[test]
    fn empty_layer_is_identity() {
        let real = ColorImage::from_fn(5, 4, |x, y| [x as f32 / 5.0, y as f32 / 4.0, 0.5]);
        let dense = DenseDepthMap::new(FloatMap::filled(5, 4, 1.0)).unwrap();
        let (c, m) = composite(&real, &dense, &VirtualLayer::empty(5, 4)).unwrap();
        assert_eq!(c, real);
        assert_eq!(m.count(), 0);
    }

    #[test]
    fn dimension_mismatch() {
        let real = ColorImage::filled(4, 4, [0.0; 3]);
        let dense = DenseDepthMap::new(FloatMap::filled(4, 4, 1.0)).unwrap();
        assert!(composite(&real, &dense, &VirtualLayer::empty(4, 3)).is_err());
    }
}
