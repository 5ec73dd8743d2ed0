//! Ground-truth stereo sequences: a textured square moving in front of a
//! textured background plane, both fronto-parallel.

use std::path::{Path, PathBuf};

use dco_core::contour::EdgeMask;
use dco_core::flow::{write_flo, FlowField};
use dco_core::imgcore::codec::{pfm::write_pfm, write_gray};
use dco_core::{Error, FloatMap, GrayImage, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::manifest::{format_manifest, FrameRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    /// Square edge length and top-left corner on frame 0 (left view, pixels).
    pub square_size: usize,
    pub square_origin: (i64, i64),
    /// Square motion per frame in pixels.
    pub shift: (i64, i64),
    pub z_fg: f64,
    pub z_bg: f64,
    pub focal_px: f64,
    pub baseline_m: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            width: 320,
            height: 240,
            frames: 3,
            seed: 7,
            square_size: 96,
            square_origin: (112, 72),
            shift: (4, 0),
            z_fg: 1.0,
            z_bg: 2.0,
            focal_px: 400.0,
            baseline_m: 0.12,
        }
    }
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.z_fg > 0.0 && self.z_fg.is_finite() && self.z_bg.is_finite()) {
            return Err(Error::Input(format!("depths must be positive and finite (z_fg {}, z_bg {})", self.z_fg, self.z_bg)));
        }
        if self.z_fg >= self.z_bg {
            return Err(Error::Input(format!(
                "foreground depth {} must be nearer than background depth {}",
                self.z_fg, self.z_bg
            )));
        }
        if !(self.focal_px > 0.0 && self.baseline_m > 0.0) {
            return Err(Error::Input("focal length and baseline must be positive".into()));
        }
        if self.width < 16 || self.height < 16 || self.frames == 0 || self.square_size < 4 {
            return Err(Error::Input("scene too small".into()));
        }
        for t in 0..self.frames {
            let (x, y) = self.square_at(t);
            let s = self.square_size as i64;
            if x < 0 || y < 0 || x + s > self.width as i64 || y + s > self.height as i64 {
                return Err(Error::Input(format!("square leaves the frame at frame {t}")));
            }
        }
        Ok(())
    }

    /// Top-left corner of the square on frame `t`.
    pub fn square_at(&self, t: usize) -> (i64, i64) {
        (self.square_origin.0 + self.shift.0 * t as i64, self.square_origin.1 + self.shift.1 * t as i64)
    }

    /// Full-resolution disparity of a plane at depth `z`.
    pub fn disparity(&self, z: f64) -> f64 {
        self.focal_px * self.baseline_m / z
    }

    pub fn in_square(&self, t: usize, x: i64, y: i64) -> bool {
        let (sx, sy) = self.square_at(t);
        let s = self.square_size as i64;
        x >= sx && x < sx + s && y >= sy && y < sy + s
    }
}

/// Periodic two-octave value noise in `[lo, hi]`, defined on all of R².
#[derive(Debug, Clone)]
struct Texture {
    coarse: Lattice,
    fine: Lattice,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone)]
struct Lattice {
    cell: f64,
    n: usize,
    values: Vec<f64>,
}

impl Lattice {
    fn new(rng: &mut ChaCha8Rng, cell: f64, n: usize) -> Self {
        Self { cell, n, values: (0..n * n).map(|_| rng.gen::<f64>()).collect() }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / self.cell, y / self.cell);
        let (fx, fy) = (gx - gx.floor(), gy - gy.floor());
        let n = self.n as i64;
        let v = |i: i64, j: i64| self.values[(j.rem_euclid(n) * n + i.rem_euclid(n)) as usize];
        let (i, j) = (gx.floor() as i64, gy.floor() as i64);
        let top = v(i, j) * (1.0 - fx) + v(i + 1, j) * fx;
        let bot = v(i, j + 1) * (1.0 - fx) + v(i + 1, j + 1) * fx;
        top * (1.0 - fy) + bot * fy
    }
}

impl Texture {
    fn new(seed: u64, lo: f64, hi: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { coarse: Lattice::new(&mut rng, 9.0, 97), fine: Lattice::new(&mut rng, 3.0, 251), lo, hi }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        self.lo + (self.hi - self.lo) * (0.6 * self.coarse.at(x, y) + 0.4 * self.fine.at(x, y))
    }
}

/// One rendered frame with its ground truth (left view).
#[derive(Debug, Clone)]
pub struct SynthFrame {
    pub left: GrayImage,
    pub right: GrayImage,
    pub depth: FloatMap,
    pub boundary: EdgeMask,
    /// Motion of each left-view pixel to the next frame.
    pub flow: FlowField,
}

pub fn render_scene(spec: &SceneSpec) -> Result<Vec<SynthFrame>> {
    spec.validate()?;
    let bg = Texture::new(spec.seed, 0.1, 0.45);
    let fg = Texture::new(spec.seed ^ 0x9e37_79b9_7f4a_7c15, 0.55, 0.9);
    let (d_fg, d_bg) = (spec.disparity(spec.z_fg), spec.disparity(spec.z_bg));
    let s = spec.square_size as f64;
    let frames = (0..spec.frames)
        .map(|t| {
            let (sx, sy) = spec.square_at(t);
            let (sx, sy) = (sx as f64, sy as f64);
            // Texture coordinates of the square move with it.
            let fg_at = |x: f64, y: f64| fg.at(x - sx, y - sy);
            let inside = |x: f64, y: f64| x >= sx && x < sx + s && y >= sy && y < sy + s;
            let left = GrayImage::from_fn(spec.width, spec.height, |x, y| {
                let (x, y) = (x as f64, y as f64);
                (if inside(x, y) { fg_at(x, y) } else { bg.at(x, y) }) as f32
            });
            // A right-view pixel at xr sees the left-view point xr + d; the nearer layer wins.
            let right = GrayImage::from_fn(spec.width, spec.height, |x, y| {
                let (x, y) = (x as f64, y as f64);
                (if inside(x + d_fg, y) { fg_at(x + d_fg, y) } else { bg.at(x + d_bg, y) }) as f32
            });
            let t_in = |x: usize, y: usize| spec.in_square(t, x as i64, y as i64);
            let depth =
                FloatMap::from_fn(spec.width, spec.height, |x, y| (if t_in(x, y) { spec.z_fg } else { spec.z_bg }) as f32);
            let boundary = EdgeMask::from_fn(spec.width, spec.height, |x, y| {
                let (xi, yi) = (x as i64, y as i64);
                spec.in_square(t, xi, yi)
                    && [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|(dx, dy)| !spec.in_square(t, xi + dx, yi + dy))
            });
            let motion = [spec.shift.0 as f32, spec.shift.1 as f32];
            let flow = FlowField::from_fn(spec.width, spec.height, |x, y| if t_in(x, y) { motion } else { [0.0; 2] });
            SynthFrame { left, right, depth, boundary, flow }
        })
        .collect();
    Ok(frames)
}

/// Writes every frame plus `manifest.tsv` into `out_dir`; returns the manifest path.
pub fn synth_scene(spec: &SceneSpec, out_dir: &Path) -> Result<PathBuf> {
    let frames = render_scene(spec)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io { path: out_dir.to_path_buf(), source: e })?;
    let mut records = Vec::with_capacity(frames.len());
    for (t, f) in frames.iter().enumerate() {
        let name = |kind: &str, ext: &str| format!("frame_{t:04}_{kind}.{ext}");
        write_gray(&f.left, out_dir.join(name("left", "pgm")))?;
        write_gray(&f.right, out_dir.join(name("right", "pgm")))?;
        write_pfm(&f.depth, out_dir.join(name("depth", "pfm")))?;
        f.boundary.write_pgm(out_dir.join(name("boundary", "pgm")))?;
        write_flo(&f.flow, out_dir.join(name("flow", "flo")))?;
        records.push(FrameRecord {
            index: t as u64,
            left: name("left", "pgm").into(),
            right: name("right", "pgm").into(),
            pose: None,
        });
    }
    let manifest = out_dir.join("manifest.tsv");
    std::fs::write(&manifest, format_manifest(&records)).map_err(|e| Error::Io { path: manifest.clone(), source: e })?;
    Ok(manifest)
}
