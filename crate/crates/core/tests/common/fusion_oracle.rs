//! Direct per-pixel evaluation of the projection-confidence fusion rule.

use dco_core::contour::AmplitudeMap;
use dco_core::flow::FlowField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_pair(w: usize, h: usize, seed: u64) -> (FlowField, FlowField, AmplitudeMap, AmplitudeMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = |rng: &mut ChaCha8Rng| {
        FlowField::from_fn(w, h, |_, _| match rng.gen_range(0..4) {
            0 => [0.0, 0.0],
            1 => [rng.gen_range(-4..=4) as f32, 0.0],
            _ => [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)],
        })
    };
    let past = field(&mut rng);
    let future = field(&mut rng);
    let amp = |rng: &mut ChaCha8Rng| {
        AmplitudeMap::new(w, h, (0..w * h).map(|_| rng.gen_range(0..8) as f32 / 4.0).collect()).unwrap()
    };
    let mp = amp(&mut rng);
    let mf = amp(&mut rng);
    (past, future, mp, mf)
}

/// `f(p_i) = I(p_i) · e` at `p_0 = p - k e`, `p_1 = p + k e`; `r = f_1 - f_0`.
fn confidence(field: &FlowField, x: usize, y: usize, k: f32) -> f32 {
    let i = field.get(x, y);
    let norm = i[0].hypot(i[1]);
    if norm < 1e-3 {
        return 0.0;
    }
    let e = [i[0] / norm, i[1] / norm];
    let p0 = field.sample_bilinear(x as f32 - k * e[0], y as f32 - k * e[1]);
    let p1 = field.sample_bilinear(x as f32 + k * e[0], y as f32 + k * e[1]);
    let f0 = p0[0] * e[0] + p0[1] * e[1];
    let f1 = p1[0] * e[0] + p1[1] * e[1];
    f1 - f0
}

pub fn fuse(past: &FlowField, future: &FlowField, mp: &AmplitudeMap, mf: &AmplitudeMap, k: f32) -> Vec<f32> {
    let mut out = Vec::new();
    for y in 0..past.height() {
        for x in 0..past.width() {
            let (rp, rf) = (confidence(past, x, y, k), confidence(future, x, y, k));
            out.push(match rp.partial_cmp(&rf).unwrap() {
                std::cmp::Ordering::Greater => mp.get(x, y),
                std::cmp::Ordering::Less => mf.get(x, y),
                std::cmp::Ordering::Equal => mp.get(x, y).max(mf.get(x, y)),
            });
        }
    }
    out
}
