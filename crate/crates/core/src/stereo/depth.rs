use super::disparity::DisparityMap;
use crate::error::{Error, Result};
use crate::imgcore::{FloatMap, PipelineConfig};

/// Full-resolution metric depth holding at most one sample per 2x2 block.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDepthMap(FloatMap);

impl SparseDepthMap {
    /// Wraps a depth map; every valid sample must be positive.
    pub fn new(map: FloatMap) -> Result<Self> {
        if let Some(v) = map.data().iter().find(|v| v.is_finite() && **v <= 0.0) {
            return Err(Error::Input(format!("sparse depth {v} is not positive")));
        }
        Ok(Self(map))
    }

    pub fn map(&self) -> &FloatMap {
        &self.0
    }

    pub fn into_map(self) -> FloatMap {
        self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }
}

/// Pinhole depth `Z = f * B / d` for a full-resolution disparity.
#[inline]
pub fn depth_from_disparity(d_full: f64, focal_px: f64, baseline_m: f64) -> Option<f64> {
    (d_full > 0.0).then(|| focal_px * baseline_m / d_full)
}

/// Inverse of [`depth_from_disparity`].
#[inline]
pub fn disparity_from_depth(z: f64, focal_px: f64, baseline_m: f64) -> f64 {
    focal_px * baseline_m / z
}

/// Lifts a quarter-scale disparity map to full-resolution sparse depth.
///
/// Disparities are doubled before triangulation. Quarter pixel `(u, v)`
/// lands on full pixel `(2u, 2v)`; the other three pixels of the block stay
/// nodata. Zero disparity (a point at infinity) gives nodata.
pub fn disparity_to_sparse_depth(
    disp: &DisparityMap,
    full_dims: (usize, usize),
    cfg: &PipelineConfig,
) -> Result<SparseDepthMap> {
    let (fw, fh) = full_dims;
    if fw / 2 != disp.width() || fh / 2 != disp.height() {
        return Err(Error::Dimension(format!(
            "full frame {fw}x{fh} does not halve to the {}x{} disparity map",
            disp.width(),
            disp.height()
        )));
    }
    let mut map = FloatMap::nodata(fw, fh);
    for v in 0..disp.height() {
        for u in 0..disp.width() {
            let z = disp
                .get(u, v)
                .and_then(|d| depth_from_disparity(2.0 * d as f64, cfg.focal_px, cfg.baseline_m));
            if let Some(z) = z {
                map.set(2 * u, 2 * v, z as f32);
            }
        }
    }
    Ok(SparseDepthMap(map))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(f: f64, b: f64) -> PipelineConfig {
        PipelineConfig {
            focal_px: f,
            baseline_m: b,
            ..Default::default()
        }
    }

    #[test]
    fn doubles_then_triangulates() {
        let disp = DisparityMap::new(1, 1, 0, 48, vec![Some(24)]).unwrap();
        let s = disparity_to_sparse_depth(&disp, (2, 2), &cfg(400.0, 0.12)).unwrap();
        assert!((s.map().get(0, 0) - 1.0).abs() < 1e-6);
        assert_eq!(s.map().valid_count(), 1);
    }

    #[test]
    fn nodata_and_zero_disparity() {
        let disp = DisparityMap::new(2, 1, 0, 48, vec![None, Some(0)]).unwrap();
        let s = disparity_to_sparse_depth(&disp, (5, 3), &cfg(400.0, 0.12)).unwrap();
        assert_eq!(s.map().valid_count(), 0);
        assert_eq!(s.dims(), (5, 3));
    }

    #[test]
    fn baseline_is_linear() {
        let disp = DisparityMap::new(2, 2, 0, 48, vec![Some(3), Some(7), None, Some(40)]).unwrap();
        let a = disparity_to_sparse_depth(&disp, (4, 4), &cfg(500.0, 0.1)).unwrap();
        let b = disparity_to_sparse_depth(&disp, (4, 4), &cfg(500.0, 0.2)).unwrap();
        for (x, y) in a.map().data().iter().zip(b.map().data()) {
            if x.is_finite() {
                assert!((2.0 * x - y).abs() < 1e-5 * y);
            } else {
                assert!(!y.is_finite());
            }
        }
    }

    #[test]
    fn depth_round_trip() {
        for z in [0.3, 1.0, 2.5, 17.0] {
            let d = disparity_from_depth(z, 612.0, 0.09);
            let back = depth_from_disparity(d, 612.0, 0.09).unwrap();
            assert!((back - z).abs() <= 1e-9 * z);
        }
    }

    #[test]
    fn mismatched_full_dims() {
        let disp = DisparityMap::new(2, 2, 0, 8, vec![Some(1); 4]).unwrap();
        assert!(disparity_to_sparse_depth(&disp, (6, 4), &cfg(1.0, 1.0)).is_err());
    }
}
