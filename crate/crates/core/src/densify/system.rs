use crate::contour::{AmplitudeMap, EdgeMask, IntensityGradientMap};
use crate::error::{Error, Result};
use crate::imgcore::{FloatMap, PipelineConfig};
use crate::stereo::SparseDepthMap;

/// Full-resolution dense depth; every sample finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseDepthMap(FloatMap);

impl DenseDepthMap {
    pub fn new(map: FloatMap) -> Result<Self> {
        if map.data().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Input("dense depth must be finite and non-negative everywhere".into()));
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

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.0.get(x, y)
    }
}

/// Contour-aware smoothness weight between 4-adjacent pixels `p` and `q`.
///
/// Zero across a contour boundary (exactly one endpoint on the mask);
/// otherwise `max(1 - min(s_p, s_q), 0)` with `s = M_fuse(m(x)) * M_I(x)`.
pub fn smoothness_weight(
    p: (usize, usize),
    q: (usize, usize),
    b_dp: &EdgeMask,
    m_fuse: &AmplitudeMap,
    m_i: &IntensityGradientMap,
) -> Result<f64> {
    if p.0.abs_diff(q.0) + p.1.abs_diff(q.1) != 1 {
        return Err(Error::Input(format!("{p:?} and {q:?} are not 4-adjacent")));
    }
    Ok(edge_weight(p, q, b_dp, m_fuse, m_i))
}

#[inline]
fn edge_weight(
    p: (usize, usize),
    q: (usize, usize),
    b_dp: &EdgeMask,
    m_fuse: &AmplitudeMap,
    m_i: &IntensityGradientMap,
) -> f64 {
    if b_dp.get(p.0, p.1) != b_dp.get(q.0, q.1) {
        return 0.0;
    }
    let s = |(x, y): (usize, usize)| m_fuse.at_full_res(x, y) as f64 * m_i.get(x, y) as f64;
    (1.0 - s(p).min(s(q))).max(0.0)
}

/// Normal equations of the densification objective on the 5-point stencil.
///
/// Unknowns are full-resolution pixels in row-major order. The matrix is
/// `diag` on the diagonal and `-east[i]` / `-south[i]` between pixel `i` and
/// its right / lower neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub(crate) width: usize,
    pub(crate) height: usize,
    pub(crate) diag: Vec<f64>,
    pub(crate) east: Vec<f64>,
    pub(crate) south: Vec<f64>,
    pub(crate) rhs: Vec<f64>,
    pub(crate) data_weight: Vec<f64>,
    pub(crate) data_target: Vec<f64>,
    pub(crate) stable_weight: Vec<f64>,
    pub(crate) stable_target: Vec<f64>,
}

impl ConstraintSystem {
    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Coupling to the right neighbour (zero on the last column).
    pub fn east(&self) -> &[f64] {
        &self.east
    }

    /// Coupling to the lower neighbour (zero on the last row).
    pub fn south(&self) -> &[f64] {
        &self.south
    }

    /// Whether pixel `i` carries a data or stability term.
    #[inline]
    pub fn is_anchor(&self, i: usize) -> bool {
        self.data_weight[i] > 0.0 || self.stable_weight[i] > 0.0
    }

    pub fn anchor_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_anchor(i)).count()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let w = self.width;
        let n = self.len();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i % w + 1 < w {
                acc -= self.east[i] * x[i + 1];
            }
            if i % w > 0 {
                acc -= self.east[i - 1] * x[i - 1];
            }
            if i + w < n {
                acc -= self.south[i] * x[i + w];
            }
            if i >= w {
                acc -= self.south[i - w] * x[i - w];
            }
            y[i] = acc;
        }
    }

    /// Value of the objective (data + doubly counted smoothness + stability) at `x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let w = self.width;
        let n = self.len();
        let mut total = 0.0;
        for i in 0..n {
            let d = x[i] - self.data_target[i];
            let s = x[i] - self.stable_target[i];
            let mut e = 0.0;
            if self.data_weight[i] > 0.0 {
                e += self.data_weight[i] * d * d;
            }
            if self.stable_weight[i] > 0.0 {
                e += self.stable_weight[i] * s * s;
            }
            if i % w + 1 < w {
                let g = x[i] - x[i + 1];
                e += self.east[i] * g * g;
            }
            if i + w < n {
                let g = x[i] - x[i + w];
                e += self.south[i] * g * g;
            }
            total += e;
        }
        total
    }
}

/// Assembles the normal equations for one frame.
///
/// `b_dp`, `m_i` and `d_sparse` are full resolution; `m_fuse` is the
/// quarter-scale normalized depth-contour filter. `d_pre` is the previous
/// frame's dense depth, absent on the first frame.
pub fn assemble_system(
    d_sparse: &SparseDepthMap,
    b_dp: &EdgeMask,
    m_fuse: &AmplitudeMap,
    m_i: &IntensityGradientMap,
    d_pre: Option<&DenseDepthMap>,
    cfg: &PipelineConfig,
) -> Result<ConstraintSystem> {
    let (w, h) = d_sparse.dims();
    if b_dp.dims() != (w, h) || m_i.dims() != (w, h) || d_pre.is_some_and(|d| d.dims() != (w, h)) {
        return Err(Error::Dimension(format!(
            "densify inputs must all be {w}x{h} (mask {:?}, gradient {:?})",
            b_dp.dims(),
            m_i.dims()
        )));
    }
    // Degenerate single-row/column frames still get a one-cell quarter grid.
    if m_fuse.dims() != ((w / 2).max(1), (h / 2).max(1)) {
        return Err(Error::Dimension(format!(
            "depth-contour filter {:?} is not the quarter-scale grid of {w}x{h}",
            m_fuse.dims()
        )));
    }
    let n = w * h;
    let mut sys = ConstraintSystem {
        width: w,
        height: h,
        diag: vec![0.0; n],
        east: vec![0.0; n],
        south: vec![0.0; n],
        rhs: vec![0.0; n],
        data_weight: vec![0.0; n],
        data_target: vec![0.0; n],
        stable_weight: vec![0.0; n],
        stable_target: vec![0.0; n],
    };
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if let Some(z) = d_sparse.map().value(x, y).filter(|z| *z > 0.0) {
                sys.data_weight[i] = cfg.lambda_d;
                sys.data_target[i] = z as f64;
            }
            if let Some(z) = d_pre.and_then(|d| d.map().value(x, y)).filter(|z| *z > 0.0) {
                if cfg.lambda_s2 > 0.0 {
                    sys.stable_weight[i] = cfg.lambda_s2;
                    sys.stable_target[i] = z as f64;
                }
            }
            // Each unordered pair appears once from each endpoint in the double sum.
            if x + 1 < w {
                sys.east[i] = 2.0 * cfg.lambda_s * edge_weight((x, y), (x + 1, y), b_dp, m_fuse, m_i);
            }
            if y + 1 < h {
                sys.south[i] = 2.0 * cfg.lambda_s * edge_weight((x, y), (x, y + 1), b_dp, m_fuse, m_i);
            }
        }
    }
    for i in 0..n {
        let mut d = sys.data_weight[i] + sys.stable_weight[i] + sys.east[i] + sys.south[i];
        if i % w > 0 {
            d += sys.east[i - 1];
        }
        if i >= w {
            d += sys.south[i - w];
        }
        sys.diag[i] = d;
        sys.rhs[i] = sys.data_weight[i] * sys.data_target[i] + sys.stable_weight[i] * sys.stable_target[i];
    }
    Ok(sys)
}
