use super::maps::AmplitudeMap;
use crate::error::{Error, Result};
use crate::flow::FlowField;
use crate::imgcore::PipelineConfig;

/// Flow magnitudes below this carry no direction; their confidence is zero.
pub const MIN_FLOW_MAGNITUDE: f32 = 1e-3;

/// Projection confidence of `field` at `(x, y)`.
///
/// With `e` the unit flow direction at the pixel, the flow is sampled
/// (bilinearly) at `p - k e` and `p + k e` and projected onto `e`; the
/// result is the forward projection minus the backward one.
pub fn projection_confidence(field: &FlowField, x: usize, y: usize, k: f32) -> f32 {
    let [u, v] = field.get(x, y);
    let mag = u.hypot(v);
    if mag < MIN_FLOW_MAGNITUDE {
        return 0.0;
    }
    let (ex, ey) = (u / mag, v / mag);
    let (px, py) = (x as f32, y as f32);
    let behind = field.sample_bilinear(px - k * ex, py - k * ey);
    let ahead = field.sample_bilinear(px + k * ex, py + k * ey);
    let f0 = behind[0] * ex + behind[1] * ey;
    let f1 = ahead[0] * ex + ahead[1] * ey;
    f1 - f0
}

/// Keeps, per pixel, the amplitude of the direction whose flow is more trustworthy.
///
/// Equal confidences keep the larger of the two amplitudes.
pub fn fuse_amplitudes(
    flow_past: &FlowField,
    flow_future: &FlowField,
    m_past: &AmplitudeMap,
    m_future: &AmplitudeMap,
    cfg: &PipelineConfig,
) -> Result<AmplitudeMap> {
    let dims = flow_past.dims();
    if flow_future.dims() != dims || m_past.dims() != dims || m_future.dims() != dims {
        return Err(Error::Dimension("fusion inputs must share dimensions".into()));
    }
    let (w, h) = dims;
    let k = cfg.confidence_offset_k as f32;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let r_past = projection_confidence(flow_past, x, y, k);
            let r_future = projection_confidence(flow_future, x, y, k);
            let (a, b) = (m_past.get(x, y), m_future.get(x, y));
            out.push(if r_past > r_future {
                a
            } else if r_future > r_past {
                b
            } else {
                a.max(b)
            });
        }
    }
    Ok(AmplitudeMap::from_vec_unchecked(w, h, out))
}

/// Mean over the `(2r+1)^2` window, restricted to pixels inside the map.
pub fn box_filter(amp: &AmplitudeMap, radius: usize) -> AmplitudeMap {
    let (w, h) = amp.dims();
    let stride = w + 1;
    let mut integral = vec![0.0f64; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0.0f64;
        for x in 0..w {
            row += amp.get(x, y) as f64;
            integral[(y + 1) * stride + x + 1] = integral[y * stride + x + 1] + row;
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(radius), (y + radius + 1).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(radius), (x + radius + 1).min(w));
            let sum = integral[y1 * stride + x1] - integral[y0 * stride + x1] - integral[y1 * stride + x0]
                + integral[y0 * stride + x0];
            let n = ((y1 - y0) * (x1 - x0)) as f64;
            out.push((sum / n).max(0.0) as f32);
        }
    }
    AmplitudeMap::from_vec_unchecked(w, h, out)
}

/// Scales so the maximum becomes 1; an all-zero map is returned unchanged.
pub fn normalize_amplitude(amp: &AmplitudeMap) -> AmplitudeMap {
    let max = amp.max();
    if max <= 0.0 {
        return amp.clone();
    }
    let data = amp.data().iter().map(|&v| (v / max).min(1.0)).collect();
    AmplitudeMap::from_vec_unchecked(amp.width(), amp.height(), data)
}
