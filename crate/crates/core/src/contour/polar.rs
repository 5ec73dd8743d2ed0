use std::f32::consts::PI;

use super::maps::AmplitudeMap;
use crate::flow::FlowField;

/// Flow in polar form: angle in `(-pi, pi]` and non-negative radius.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFlowField {
    width: usize,
    height: usize,
    theta: Vec<f32>,
    r: Vec<f32>,
}

impl PolarFlowField {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn theta(&self, x: usize, y: usize) -> f32 {
        self.theta[y * self.width + x]
    }

    #[inline]
    pub fn radius(&self, x: usize, y: usize) -> f32 {
        self.r[y * self.width + x]
    }

    /// Builds a field directly from radii (angles zero); mostly for tests.
    pub fn from_radii(width: usize, height: usize, r: Vec<f32>) -> Self {
        assert_eq!(r.len(), width * height);
        assert!(r.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self {
            width,
            height,
            theta: vec![0.0; width * height],
            r,
        }
    }
}

/// `(u, v) -> (atan2(v, u), |(u, v)|)`; the zero vector maps to angle 0.
pub fn to_polar(u: f32, v: f32) -> (f32, f32) {
    let r = u.hypot(v);
    let mut theta = if r == 0.0 { 0.0 } else { v.atan2(u) };
    if theta <= -PI {
        theta = PI;
    }
    (theta, r)
}

pub fn flow_to_polar(flow: &FlowField) -> PolarFlowField {
    let (theta, r) = flow.data().iter().map(|&[u, v]| to_polar(u, v)).unzip();
    PolarFlowField {
        width: flow.width(),
        height: flow.height(),
        theta,
        r,
    }
}

/// Larger of the horizontal and vertical radius changes at each pixel.
///
/// Forward differences, switching to backward differences on the last
/// column / row.
pub fn gradient_amplitude(polar: &PolarFlowField) -> AmplitudeMap {
    let (w, h) = (polar.width, polar.height);
    let r = &polar.r;
    let mut out = vec![0.0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let gu = if w < 2 {
                0.0
            } else if x + 1 < w {
                r[i + 1] - r[i]
            } else {
                r[i] - r[i - 1]
            };
            let gv = if h < 2 {
                0.0
            } else if y + 1 < h {
                r[i + w] - r[i]
            } else {
                r[i] - r[i - w]
            };
            out[i] = gu.abs().max(gv.abs());
        }
    }
    AmplitudeMap::from_vec_unchecked(w, h, out)
}
