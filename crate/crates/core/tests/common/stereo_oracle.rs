//! Brute-force winner-takes-all and histogram-refinement references.

use std::collections::BTreeMap;

use dco_core::stereo::{Arms, CostVolume, CrossWindowField, DisparityMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Costs drawn from a coarse grid so exact ties are common.
pub fn random_volume(w: usize, h: usize, seed: u64) -> CostVolume {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_min = rng.gen_range(-3..4);
    let d_max = d_min + rng.gen_range(1..12);
    let n = (d_max - d_min + 1) as usize * w * h;
    let cost = (0..n).map(|_| rng.gen_range(0..6) as f32 / 5.0).collect();
    CostVolume::from_slices(w, h, d_min, d_max, cost).unwrap()
}

pub fn wta(vol: &CostVolume) -> Vec<Option<i32>> {
    let mut out = Vec::new();
    for y in 0..vol.height() {
        for x in 0..vol.width() {
            let mut all: Vec<(f32, i32)> = (vol.d_min()..=vol.d_max()).map(|d| (vol.cost(x, y, d), d)).collect();
            all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            out.push(Some(all[0].1));
        }
    }
    out
}

pub fn random_field(w: usize, h: usize, seed: u64) -> (DisparityMap, CrossWindowField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d_min, d_max) = (0, rng.gen_range(2..6));
    let data = (0..w * h)
        .map(|_| if rng.gen_bool(0.15) { None } else { Some(rng.gen_range(d_min..=d_max)) })
        .collect();
    let arms = (0..w * h)
        .map(|_| Arms {
            left: rng.gen_range(0..4),
            right: rng.gen_range(0..4),
            up: rng.gen_range(0..4),
            down: rng.gen_range(0..4),
        })
        .collect();
    (DisparityMap::new(w, h, d_min, d_max, data).unwrap(), CrossWindowField::from_arms(w, h, arms))
}

/// Support region: for every row on the vertical arm of `(x, y)`, the
/// horizontal span of the pixel on that row.
fn region(win: &CrossWindowField, x: usize, y: usize) -> Vec<(usize, usize)> {
    let a = win.arms(x, y);
    let mut px = Vec::new();
    for yy in y - a.up as usize..=y + a.down as usize {
        let r = win.arms(x, yy);
        for xx in x - r.left as usize..=x + r.right as usize {
            px.push((xx, yy));
        }
    }
    px
}

pub fn refine(disp: &DisparityMap, win: &CrossWindowField, iterations: usize) -> Vec<Option<i32>> {
    let (w, h) = (disp.width(), disp.height());
    let mut cur: Vec<Option<i32>> = disp.data().to_vec();
    for _ in 0..iterations {
        let mut next = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let px = region(win, x, y);
                let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
                for (xx, yy) in &px {
                    if let Some(d) = cur[yy * w + xx] {
                        *counts.entry(d).or_default() += 1;
                    }
                }
                // BTreeMap iterates ascending, so the first maximum is the smallest d.
                let mode = counts.iter().fold(None, |best: Option<(i32, usize)>, (&d, &c)| match best {
                    Some((_, bc)) if bc >= c => best,
                    _ => Some((d, c)),
                });
                next.push(match mode {
                    None => None,
                    Some((_, 1)) if px.len() >= 4 => None,
                    Some((d, _)) => Some(d),
                });
            }
        }
        cur = next;
    }
    cur
}
