use rayon::prelude::*;

use super::system::{ConstraintSystem, DenseDepthMap};
use crate::error::{Error, Result};
use crate::imgcore::{FloatMap, PipelineConfig};

// Fixed partition so reductions are bit-identical for any thread count.
const CHUNK: usize = 4096;

/// Outcome of one conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub depth: DenseDepthMap,
    /// Solution in f64 before conversion, row-major.
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `||b - A x_k||_2` for k = 0..=iterations, over solved pixels.
    pub residual_history: Vec<f64>,
    /// Objective at every iterate; conjugate gradients minimise it monotonically.
    pub objective_history: Vec<f64>,
    /// Objective at the initial guess and at the solution.
    pub objective_initial: f64,
    pub objective_final: f64,
    /// Pixels in components without any anchor, filled with the anchor mean.
    pub unanchored: usize,
}

/// Solves the densification system; see [`solve_with_report`].
pub fn solve_dense_depth(sys: &ConstraintSystem, cfg: &PipelineConfig) -> Result<DenseDepthMap> {
    solve_with_report(sys, cfg).map(|r| r.depth)
}

/// Jacobi-preconditioned conjugate gradients on the anchored components.
///
/// Pixels whose smoothness component has no anchor cannot be determined and
/// take the mean sparse depth. With no anchor anywhere the frame is
/// unsolvable. Hitting the iteration cap returns the last iterate with
/// `converged == false`.
pub fn solve_with_report(sys: &ConstraintSystem, cfg: &PipelineConfig) -> Result<SolveReport> {
    let n = sys.len();
    let anchors: Vec<usize> = (0..n).filter(|&i| sys.is_anchor(i)).collect();
    if anchors.is_empty() {
        return Err(Error::Unsolvable("no valid sparse depth and no previous depth to anchor the solve".into()));
    }
    let fill = anchor_mean(sys, &anchors);
    let active = anchored_components(sys, &anchors);
    let unanchored = active.iter().filter(|a| !**a).count();

    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            if sys.data_weight[i] > 0.0 {
                sys.data_target[i]
            } else if sys.stable_weight[i] > 0.0 {
                sys.stable_target[i]
            } else {
                fill
            }
        })
        .collect();
    let objective_initial = sys.objective(&x);
    let inv_diag: Vec<f64> = (0..n)
        .map(|i| if active[i] { 1.0 / sys.diag[i] } else { 0.0 })
        .collect();

    let mask = |v: &mut [f64]| {
        v.par_iter_mut().zip(active.par_iter()).for_each(|(e, a)| {
            if !*a {
                *e = 0.0;
            }
        })
    };

    let mut ax = vec![0.0; n];
    apply_par(sys, &x, &mut ax);
    let mut r: Vec<f64> = sys.rhs.par_iter().zip(ax.par_iter()).map(|(b, a)| b - a).collect();
    mask(&mut r);
    let b_norm = {
        let mut b = sys.rhs.clone();
        mask(&mut b);
        dot(&b, &b).sqrt()
    };
    let mut z: Vec<f64> = r.par_iter().zip(inv_diag.par_iter()).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = dot(&r, &r).sqrt();
    let mut history = vec![res];
    let mut objectives = vec![objective_initial];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    let tol = cfg.solver_tol * b_norm.max(f64::MIN_POSITIVE);
    let mut converged = res <= tol;

    while !converged && iterations < cfg.solver_max_iter {
        apply_par(sys, &p, &mut ap);
        mask(&mut ap);
        let pap = dot(&p, &ap);
        // also stops on NaN
        if pap.is_nan() || pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        x.par_iter_mut().zip(p.par_iter()).for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut().zip(ap.par_iter()).for_each(|(r, a)| *r -= alpha * a);
        iterations += 1;
        res = dot(&r, &r).sqrt();
        history.push(res);
        objectives.push(sys.objective(&x));
        if res <= tol {
            converged = true;
            break;
        }
        z.par_iter_mut()
            .zip(r.par_iter().zip(inv_diag.par_iter()))
            .for_each(|(z, (r, m))| *z = r * m);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(p, z)| *p = z + beta * *p);
    }
    if !converged {
        log::warn!(
            "dense depth solve stopped after {iterations} iterations at relative residual {:.3e}",
            res / b_norm.max(f64::MIN_POSITIVE)
        );
    }

    let objective_final = *objectives.last().unwrap_or(&objective_initial);
    let data: Vec<f32> = x.iter().map(|v| v.max(0.0) as f32).collect();
    let depth = DenseDepthMap::new(FloatMap::new(sys.width, sys.height, data)?)?;
    Ok(SolveReport {
        depth,
        solution: x,
        iterations,
        converged,
        residual_history: history,
        objective_history: objectives,
        objective_initial,
        objective_final,
        unanchored,
    })
}

fn anchor_mean(sys: &ConstraintSystem, anchors: &[usize]) -> f64 {
    let sparse: Vec<f64> = anchors
        .iter()
        .filter(|&&i| sys.data_weight[i] > 0.0)
        .map(|&i| sys.data_target[i])
        .collect();
    let vals = if sparse.is_empty() {
        anchors.iter().map(|&i| sys.stable_target[i]).collect()
    } else {
        sparse
    };
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Marks pixels connected to at least one anchor through non-zero couplings.
fn anchored_components(sys: &ConstraintSystem, anchors: &[usize]) -> Vec<bool> {
    let (w, n) = (sys.width, sys.len());
    let mut active = vec![false; n];
    let mut stack = Vec::new();
    for &a in anchors {
        if !active[a] {
            active[a] = true;
            stack.push(a);
        }
    }
    while let Some(i) = stack.pop() {
        let mut visit = |j: usize, c: f64| {
            if c > 0.0 && !active[j] {
                active[j] = true;
                stack.push(j);
            }
        };
        if i % w + 1 < w {
            visit(i + 1, sys.east[i]);
        }
        if i % w > 0 {
            visit(i - 1, sys.east[i - 1]);
        }
        if i + w < n {
            visit(i + w, sys.south[i]);
        }
        if i >= w {
            visit(i - w, sys.south[i - w]);
        }
    }
    active
}

fn apply_par(sys: &ConstraintSystem, x: &[f64], y: &mut [f64]) {
    let w = sys.width;
    let h = sys.height;
    y.par_chunks_mut(w).enumerate().for_each(|(row, out)| {
        let base = row * w;
        for (c, o) in out.iter_mut().enumerate() {
            let i = base + c;
            let mut acc = sys.diag[i] * x[i];
            if c + 1 < w {
                acc -= sys.east[i] * x[i + 1];
            }
            if c > 0 {
                acc -= sys.east[i - 1] * x[i - 1];
            }
            if row + 1 < h {
                acc -= sys.south[i] * x[i + w];
            }
            if row > 0 {
                acc -= sys.south[i - w] * x[i - w];
            }
            *o = acc;
        }
    });
}

/// Dot product with a thread-count independent summation order.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    partials.iter().sum()
}
