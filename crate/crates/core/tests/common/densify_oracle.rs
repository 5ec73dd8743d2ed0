//! Independent dense reference for the densification normal equations.

use dco_core::contour::{AmplitudeMap, EdgeMask, IntensityGradientMap};
use dco_core::densify::DenseDepthMap;
use dco_core::stereo::SparseDepthMap;
use dco_core::{FloatMap, PipelineConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct DensifyInputs {
    pub sparse: SparseDepthMap,
    pub mask: EdgeMask,
    pub m_fuse: AmplitudeMap,
    pub m_i: IntensityGradientMap,
    pub pre: Option<DenseDepthMap>,
}

/// Random frame: ~25% anchors in [1, 5], scattered contour pixels, random saliency.
pub fn random_inputs(w: usize, h: usize, seed: u64, with_pre: bool) -> DensifyInputs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sparse = FloatMap::nodata(w, h);
    for y in 0..h {
        for x in 0..w {
            if rng.gen_bool(0.25) {
                sparse.set(x, y, rng.gen_range(1.0..5.0));
            }
        }
    }
    if sparse.valid_count() == 0 {
        sparse.set(0, 0, 2.0);
    }
    let mask = EdgeMask::from_fn(w, h, |_, _| rng.gen_bool(0.15));
    let (qw, qh) = ((w / 2).max(1), (h / 2).max(1));
    let m_fuse = AmplitudeMap::new(qw, qh, (0..qw * qh).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
    let m_i = IntensityGradientMap::new(FloatMap::from_fn(w, h, |_, _| rng.gen_range(0.0..1.0))).unwrap();
    let pre = with_pre.then(|| DenseDepthMap::new(FloatMap::from_fn(w, h, |_, _| rng.gen_range(1.0..5.0))).unwrap());
    DensifyInputs { sparse: SparseDepthMap::new(sparse).unwrap(), mask, m_fuse, m_i, pre }
}

fn weight(inp: &DensifyInputs, p: (usize, usize), q: (usize, usize)) -> f64 {
    let on = |(x, y): (usize, usize)| inp.mask.get(x, y) as u8;
    if on(p) + on(q) == 1 {
        return 0.0;
    }
    let (qw, qh) = inp.m_fuse.dims();
    let s = |(x, y): (usize, usize)| {
        inp.m_fuse.get((x / 2).min(qw - 1), (y / 2).min(qh - 1)) as f64 * inp.m_i.get(x, y) as f64
    };
    (1.0 - s(p).min(s(q))).max(0.0)
}

/// Objective terms written out pixel by pixel, then differentiated by hand:
/// `A = diag(data + stable) + L`, where `L` is the Laplacian of `2 λ_s w_pq`.
pub fn normal_equations(inp: &DensifyInputs, cfg: &PipelineConfig) -> (DMatrix<f64>, DVector<f64>, Vec<bool>) {
    let (w, h) = inp.sparse.dims();
    let n = w * h;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    let mut anchored = vec![false; n];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if let Some(z) = inp.sparse.map().value(x, y) {
                a[(i, i)] += cfg.lambda_d;
                b[i] += cfg.lambda_d * z as f64;
                anchored[i] = true;
            }
            if let Some(pre) = &inp.pre {
                if cfg.lambda_s2 > 0.0 {
                    let z = pre.get(x, y) as f64;
                    if z > 0.0 {
                        a[(i, i)] += cfg.lambda_s2;
                        b[i] += cfg.lambda_s2 * z;
                        anchored[i] = true;
                    }
                }
            }
            // Double sum over p and q in N4(p): every edge visited from both ends.
            let mut nbrs = Vec::new();
            if x > 0 {
                nbrs.push((x - 1, y));
            }
            if x + 1 < w {
                nbrs.push((x + 1, y));
            }
            if y > 0 {
                nbrs.push((x, y - 1));
            }
            if y + 1 < h {
                nbrs.push((x, y + 1));
            }
            for q in nbrs {
                let j = q.1 * w + q.0;
                let c = cfg.lambda_s * weight(inp, (x, y), q);
                a[(i, i)] += c;
                a[(j, j)] += c;
                a[(i, j)] -= c;
                a[(j, i)] -= c;
            }
        }
    }
    (a, b, anchored)
}

/// Direct solve; components of the coupling graph without anchors take the mean sparse depth.
pub fn dense_solve(inp: &DensifyInputs, cfg: &PipelineConfig) -> Vec<f64> {
    let (a, b, anchored) = normal_equations(inp, cfg);
    let n = b.len();
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut queue = vec![s];
        comp[s] = ncomp;
        while let Some(i) = queue.pop() {
            for j in 0..n {
                if j != i && a[(i, j)] != 0.0 && comp[j] == usize::MAX {
                    comp[j] = ncomp;
                    queue.push(j);
                }
            }
        }
        ncomp += 1;
    }
    let live: Vec<bool> = (0..ncomp).map(|c| (0..n).any(|i| comp[i] == c && anchored[i])).collect();
    let sparse_vals: Vec<f64> = inp.sparse.map().data().iter().filter(|v| v.is_finite()).map(|&v| v as f64).collect();
    let mean = sparse_vals.iter().sum::<f64>() / sparse_vals.len() as f64;
    let idx: Vec<usize> = (0..n).filter(|&i| live[comp[i]]).collect();
    let m = idx.len();
    let sub = DMatrix::from_fn(m, m, |r, c| a[(idx[r], idx[c])]);
    let rhs = DVector::from_fn(m, |r, _| b[idx[r]]);
    let sol = sub.cholesky().expect("anchored block is SPD").solve(&rhs);
    let mut out = vec![mean; n];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = sol[k];
    }
    out
}
