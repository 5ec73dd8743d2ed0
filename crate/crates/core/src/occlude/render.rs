use rayon::prelude::*;

use super::mesh::TriangleMesh;
use crate::error::{Error, Result};
use crate::imgcore::{ColorImage, FloatMap};

/// Rendered colour and camera-space depth of the virtual object.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualLayer {
    color: ColorImage,
    depth: FloatMap,
}

impl VirtualLayer {
    pub fn new(color: ColorImage, depth: FloatMap) -> Result<Self> {
        if color.dims() != depth.dims() {
            return Err(Error::Dimension(format!(
                "virtual colour {:?} and depth {:?} differ",
                color.dims(),
                depth.dims()
            )));
        }
        if depth.data().iter().any(|z| z.is_finite() && *z <= 0.0) {
            return Err(Error::Input("virtual depth must be positive where present".into()));
        }
        Ok(Self { color, depth })
    }

    /// No virtual geometry anywhere.
    pub fn empty(width: usize, height: usize) -> Self {
        Self { color: ColorImage::filled(width, height, [0.0; 3]), depth: FloatMap::nodata(width, height) }
    }

    pub fn color(&self) -> &ColorImage {
        &self.color
    }

    pub fn depth(&self) -> &FloatMap {
        &self.depth
    }

    pub fn dims(&self) -> (usize, usize) {
        self.depth.dims()
    }

    pub fn coverage(&self) -> usize {
        self.depth.valid_count()
    }
}

/// Principal point at the image centre, pixel centres on integer coordinates.
pub fn default_principal(dims: (usize, usize)) -> (f64, f64) {
    ((dims.0 as f64 - 1.0) / 2.0, (dims.1 as f64 - 1.0) / 2.0)
}

struct Projected {
    p: [[f64; 2]; 3],
    inv_z: [f64; 3],
    color: [[f64; 3]; 3],
    area: f64,
    rows: (usize, usize),
    cols: (usize, usize),
}

#[inline]
fn edge(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

// Tie rule for pixel centres exactly on an edge: a shared edge is walked in
// opposite directions by its two triangles, so exactly one of them owns it.
#[inline]
fn owns_edge(a: [f64; 2], b: [f64; 2]) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    dy > 0.0 || (dy == 0.0 && dx < 0.0)
}

fn project(mesh: &TriangleMesh, t: &[usize; 3], f: f64, c: (f64, f64), w: usize, h: usize) -> Option<Projected> {
    let v = t.map(|i| mesh.vertices()[i]);
    if v.iter().any(|v| v[2] <= 0.0) {
        return None;
    }
    let mut p = v.map(|v| [f * v[0] / v[2] + c.0, f * v[1] / v[2] + c.1]);
    let mut inv_z = v.map(|v| 1.0 / v[2]);
    let mut color = t.map(|i| mesh.colors()[i].map(f64::from));
    let mut area = edge(p[0], p[1], p[2]);
    if area == 0.0 || !area.is_finite() {
        return None;
    }
    if area < 0.0 {
        p.swap(1, 2);
        inv_z.swap(1, 2);
        color.swap(1, 2);
        area = -area;
    }
    let lo = |k: usize| p.iter().map(|q| q[k]).fold(f64::INFINITY, f64::min).ceil().max(0.0);
    let hi = |k: usize| p.iter().map(|q| q[k]).fold(f64::NEG_INFINITY, f64::max).floor();
    let (x0, x1, y0, y1) = (lo(0), hi(0).min(w as f64 - 1.0), lo(1), hi(1).min(h as f64 - 1.0));
    if x0 > x1 || y0 > y1 {
        return None;
    }
    Some(Projected {
        p,
        inv_z,
        color,
        area,
        rows: (y0 as usize, y1 as usize),
        cols: (x0 as usize, x1 as usize),
    })
}

/// Z-buffered rasterization of `mesh` through a pinhole camera.
///
/// Triangles with any vertex at `z <= 0` are skipped (no clipping). Depth
/// and colour are interpolated perspective-correctly; on exact depth ties
/// the earlier triangle wins.
pub fn render_virtual(
    mesh: &TriangleMesh,
    focal_px: f64,
    principal: (f64, f64),
    dims: (usize, usize),
) -> Result<VirtualLayer> {
    let (w, h) = dims;
    if !(focal_px.is_finite() && focal_px > 0.0) {
        return Err(Error::Input(format!("focal length {focal_px} must be positive")));
    }
    let tris: Vec<Projected> = mesh
        .triangles()
        .iter()
        .filter_map(|t| project(mesh, t, focal_px, principal, w, h))
        .collect();
    let mut depth = vec![f32::NAN; w * h];
    let mut color = vec![0.0f32; 3 * w * h];
    depth
        .par_chunks_mut(w.max(1))
        .zip(color.par_chunks_mut((3 * w).max(1)))
        .enumerate()
        .for_each(|(y, (zrow, crow))| {
            let mut zbuf = vec![f64::INFINITY; w];
            for t in tris.iter().filter(|t| (t.rows.0..=t.rows.1).contains(&y)) {
                for x in t.cols.0..=t.cols.1 {
                    let q = [x as f64, y as f64];
                    let b = [
                        (edge(t.p[1], t.p[2], q), owns_edge(t.p[1], t.p[2])),
                        (edge(t.p[2], t.p[0], q), owns_edge(t.p[2], t.p[0])),
                        (edge(t.p[0], t.p[1], q), owns_edge(t.p[0], t.p[1])),
                    ];
                    if !b.iter().all(|&(e, own)| e > 0.0 || (e == 0.0 && own)) {
                        continue;
                    }
                    let bary = b.map(|(e, _)| e / t.area);
                    let inv = (0..3).map(|k| bary[k] * t.inv_z[k]).sum::<f64>();
                    let z = 1.0 / inv;
                    if z < zbuf[x] {
                        zbuf[x] = z;
                        zrow[x] = z as f32;
                        for ch in 0..3 {
                            let c = (0..3).map(|k| bary[k] * t.inv_z[k] * t.color[k][ch]).sum::<f64>() * z;
                            crow[3 * x + ch] = c.clamp(0.0, 1.0) as f32;
                        }
                    }
                }
            }
        });
    VirtualLayer::new(ColorImage::new(w, h, color)?, FloatMap::new(w, h, depth)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(x0: f64, x1: f64, z: f64, c: [f32; 3]) -> (Vec<[f64; 3]>, Vec<[f32; 3]>) {
        // Vertices placed so the projection with f=z, principal (0,0) lands on [x0,x1]².
        (vec![[x0, x0, z], [x1, x0, z], [x1, x1, z], [x0, x1, z]], vec![c; 4])
    }

    #[test]
    fn frontoparallel_square_covers_exact_pixels() {
        let (v, c) = quad(9.5 * 2.0, 20.5 * 2.0, 2.0, [1.0, 0.0, 0.0]);
        let mesh = TriangleMesh::new(v, c, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        let layer = render_virtual(&mesh, 1.0, (0.0, 0.0), (32, 32)).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                let inside = (10..=20).contains(&x) && (10..=20).contains(&y);
                assert_eq!(layer.depth().value(x, y), inside.then_some(2.0), "({x},{y})");
            }
        }
        assert_eq!(layer.coverage(), 121);
        assert_eq!(layer.color().pixel(15, 15), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn shared_diagonal_has_no_gaps_or_double_writes() {
        // Square aligned to pixel centres so many centres lie exactly on edges.
        let mesh = TriangleMesh::new(
            vec![[2.0, 2.0, 1.0], [10.0, 2.0, 1.0], [10.0, 10.0, 1.0], [2.0, 10.0, 1.0]],
            vec![[1.0; 3]; 4],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let layer = render_virtual(&mesh, 1.0, (0.0, 0.0), (16, 16)).unwrap();
        // half-open ownership: 8×8 pixels for an 8×8 square
        assert_eq!(layer.coverage(), 64);
        for i in 3..10 {
            assert!(layer.depth().is_valid(i, i));
        }
    }

    #[test]
    fn zbuffer_keeps_nearest() {
        let mesh = TriangleMesh::new(
            vec![[0.0, 0.0, 1.0], [20.0, 0.0, 1.0], [0.0, 20.0, 1.0], [0.0, 0.0, 3.0], [90.0, 0.0, 3.0], [0.0, 90.0, 3.0]],
            vec![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
            vec![[3, 4, 5], [0, 1, 2]],
        )
        .unwrap();
        let layer = render_virtual(&mesh, 1.0, (0.0, 0.0), (24, 24)).unwrap();
        assert_eq!(layer.depth().value(2, 2), Some(1.0));
        assert_eq!(layer.color().pixel(2, 2), [1.0, 0.0, 0.0]);
        assert_eq!(layer.depth().value(19, 3), Some(3.0));
    }

    #[test]
    fn perspective_correct_depth_on_slanted_plane() {
        // Plane z = 2 + 0.05 x in camera space; depth must be exact, not screen-linear.
        let pts: Vec<[f64; 3]> = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]
            .iter()
            .map(|&[x, y]| [x, y, 2.0 + 0.5 * x])
            .collect();
        let mesh = TriangleMesh::new(pts, vec![[0.5; 3]; 4], vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        let (f, c) = (20.0, (15.5, 15.5));
        let layer = render_virtual(&mesh, f, c, (32, 32)).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                if let Some(z) = layer.depth().value(x, y) {
                    // ray (u-cx)/f * z = X, plane z = 2 + 0.5 X  =>  z = 2 / (1 - 0.5 (u-cx)/f)
                    let want = 2.0 / (1.0 - 0.5 * (x as f64 - c.0) / f);
                    assert!((z as f64 - want).abs() < 1e-5, "({x},{y}) {z} vs {want}");
                }
            }
        }
        assert!(layer.coverage() > 200);
    }

    #[test]
    fn behind_camera_and_empty() {
        let mesh = TriangleMesh::new(
            vec![[0.0, 0.0, -1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]],
            vec![[1.0; 3]; 3],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(render_virtual(&mesh, 10.0, (4.0, 4.0), (8, 8)).unwrap().coverage(), 0);
        let empty = render_virtual(&TriangleMesh::empty(), 10.0, (4.0, 4.0), (8, 8)).unwrap();
        assert_eq!(empty, VirtualLayer::empty(8, 8));
    }
}
