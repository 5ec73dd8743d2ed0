use std::path::Path;

use crate::error::{Error, Result};

/// Vertex colour for OBJ vertices without the `r g b` extension.
pub const DEFAULT_VERTEX_COLOR: [f32; 3] = [0.8, 0.8, 0.8];

/// Triangle soup in camera coordinates (metres) with per-vertex colour.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<[f64; 3]>,
    colors: Vec<[f32; 3]>,
    triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<[f64; 3]>, colors: Vec<[f32; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if colors.len() != vertices.len() {
            return Err(Error::Input(format!(
                "{} vertices but {} colours",
                vertices.len(),
                colors.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::Input(format!("non-finite vertex {v:?}")));
        }
        if let Some(c) = colors.iter().find(|c| c.iter().any(|c| !(0.0..=1.0).contains(c))) {
            return Err(Error::Input(format!("vertex colour {c:?} outside [0,1]")));
        }
        for (k, t) in triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::Input(format!("triangle {k} {t:?} indexes past {} vertices", vertices.len())));
            }
            if is_degenerate(&vertices, t) {
                return Err(Error::Input(format!("triangle {k} {t:?} is degenerate")));
            }
        }
        Ok(Self { vertices, colors, triangles })
    }

    pub fn empty() -> Self {
        Self { vertices: Vec::new(), colors: Vec::new(), triangles: Vec::new() }
    }

    /// Axis-aligned cube of edge `size` centred at `center`, twelve triangles.
    pub fn cube(center: [f64; 3], size: f64, color: [f32; 3]) -> Result<Self> {
        let h = size / 2.0;
        let vertices = (0..8)
            .map(|i| {
                let s = |bit: usize| if i >> bit & 1 == 1 { h } else { -h };
                [center[0] + s(0), center[1] + s(1), center[2] + s(2)]
            })
            .collect();
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        let triangles = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        Self::new(vertices, vec![color; 8], triangles)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn colors(&self) -> &[[f32; 3]] {
        &self.colors
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Applies a rigid pose to every vertex.
    pub fn transformed(&self, pose: &Pose) -> Self {
        let vertices = self.vertices.iter().map(|v| pose.apply(*v)).collect();
        Self { vertices, colors: self.colors.clone(), triangles: self.triangles.clone() }
    }
}

fn is_degenerate(v: &[[f64; 3]], t: &[usize; 3]) -> bool {
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return true;
    }
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let (e1, e2) = (sub(v[t[1]], v[t[0]]), sub(v[t[2]], v[t[0]]));
    let n = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    n.iter().all(|c| *c == 0.0)
}

/// Rigid 4×4 transform, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose([f64; 16]);

impl Pose {
    const RIGID_TOL: f64 = 1e-6;

    pub const IDENTITY: Pose = Pose([1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.]);

    /// Validates that the rotation block is orthonormal with determinant +1
    /// and the last row is `0 0 0 1`.
    pub fn from_row_major(m: [f64; 16]) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("pose contains non-finite entries".into()));
        }
        if m[12] != 0.0 || m[13] != 0.0 || m[14] != 0.0 || m[15] != 1.0 {
            return Err(Error::Input("pose last row must be 0 0 0 1".into()));
        }
        let r = |i: usize, j: usize| m[i * 4 + j];
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r(i, k) * r(j, k)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > Self::RIGID_TOL {
                    return Err(Error::Input("pose rotation block is not orthonormal".into()));
                }
            }
        }
        let det = r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) - r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0))
            + r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
        if det < 0.0 {
            return Err(Error::Input("pose rotation is a reflection".into()));
        }
        Ok(Self(m))
    }

    pub fn translation(t: [f64; 3]) -> Self {
        let mut m = Self::IDENTITY.0;
        m[3] = t[0];
        m[7] = t[1];
        m[11] = t[2];
        Self(m)
    }

    pub fn as_row_major(&self) -> &[f64; 16] {
        &self.0
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        std::array::from_fn(|i| m[i * 4] * v[0] + m[i * 4 + 1] * v[1] + m[i * 4 + 2] * v[2] + m[i * 4 + 3])
    }
}

/// Parses ASCII OBJ: `v x y z [r g b]` and polygonal `f` records
/// (`i`, `i/t`, `i//n`, `i/t/n`; negative indices are relative). Polygons
/// are fan-triangulated; other statements are ignored.
pub fn decode_obj(bytes: &[u8]) -> Result<TriangleMesh> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::codec(e.valid_up_to(), "OBJ is not valid UTF-8"))?;
    let mut vertices = Vec::new();
    let mut colors = Vec::new();
    let mut faces: Vec<(usize, [usize; 3])> = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let line = raw.split('#').next().unwrap_or("");
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let nums = tokens
                    .map(|t| t.parse::<f64>().map_err(|_| Error::codec(line_start, format!("bad vertex number {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                let (pos, col) = match nums.len() {
                    3 | 4 => ([nums[0], nums[1], nums[2]], DEFAULT_VERTEX_COLOR),
                    6 | 7 => ([nums[0], nums[1], nums[2]], [nums[3] as f32, nums[4] as f32, nums[5] as f32]),
                    n => return Err(Error::codec(line_start, format!("vertex has {n} components"))),
                };
                if pos.iter().any(|v| !v.is_finite()) {
                    return Err(Error::codec(line_start, "non-finite vertex position"));
                }
                if col.iter().any(|c| !(0.0..=1.0).contains(c)) {
                    return Err(Error::codec(line_start, "vertex colour outside [0,1]"));
                }
                vertices.push(pos);
                colors.push(col);
            }
            Some("f") => {
                let idx = tokens
                    .map(|t| resolve_index(t, vertices.len()).ok_or_else(|| Error::codec(line_start, format!("bad face index {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() < 3 {
                    return Err(Error::codec(line_start, "face needs at least 3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push((line_start, [idx[0], idx[k], idx[k + 1]]));
                }
            }
            _ => {}
        }
    }
    for (at, t) in &faces {
        if is_degenerate(&vertices, t) {
            return Err(Error::codec(*at, format!("degenerate face {t:?}")));
        }
    }
    TriangleMesh::new(vertices, colors, faces.into_iter().map(|(_, t)| t).collect())
}

/// 1-based or negative (relative) OBJ index against the vertices seen so far.
fn resolve_index(token: &str, seen: usize) -> Option<usize> {
    let head = token.split('/').next()?;
    let i: i64 = head.parse().ok()?;
    let resolved = if i > 0 { i - 1 } else { seen as i64 + i };
    (i != 0 && resolved >= 0 && (resolved as usize) < seen).then_some(resolved as usize)
}

/// Writes `v x y z r g b` and 1-based `f` records; decodes back to an equal mesh.
pub fn encode_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for (v, c) in mesh.vertices().iter().zip(mesh.colors()) {
        out.push_str(&format!("v {} {} {} {} {} {}\n", v[0], v[1], v[2], c[0], c[1], c[2]));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    out
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_obj(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quad_with_colours_and_relative_indices() {
        let obj = b"# quad\nv 0 0 2 1 0 0\nv 1 0 2 0 1 0\nv 1 1 2\nv 0 1 2 0 0 1\nvn 0 0 1\nf -4//1 -3//1 -2//1 -1//1\n";
        let m = decode_obj(obj).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.colors()[2], DEFAULT_VERTEX_COLOR);
        assert_eq!(m.colors()[1], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_records_with_offsets() {
        let err = decode_obj(b"v 0 0 1\nv 1 0 1\nf 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Codec { offset: 16, .. }), "{err}");
        assert!(decode_obj(b"v 0 0\n").is_err());
        assert!(decode_obj(b"v 0 0 1\nv 0 0 1\nv 1 1 1\nf 1 2 3\n").is_err());
        assert!(decode_obj(b"v 0 0 1 2 0 0\n").is_err());
        assert!(decode_obj(b"v 0 0 1\nf 0 1 1\n").is_err());
    }

    #[test]
    fn encode_round_trips() {
        let c = TriangleMesh::cube([0.1, -0.3, 2.7], 0.33, [0.9, 0.2, 0.1]).unwrap();
        let back = decode_obj(encode_obj(&c).as_bytes()).unwrap();
        assert_eq!(back.vertices(), c.vertices());
        assert_eq!(back.colors(), c.colors());
        assert_eq!(back.triangles(), c.triangles());
    }

    #[test]
    fn cube_is_closed() {
        let c = TriangleMesh::cube([0.0, 0.0, 3.0], 1.0, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.triangles().len(), 12);
        // every undirected edge is shared by exactly two triangles
        let mut edges = std::collections::HashMap::new();
        for t in c.triangles() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        assert!(edges.values().all(|&n| n == 2));
    }

    #[test]
    fn pose_validation_and_apply() {
        let p = Pose::translation([1.0, 2.0, 3.0]);
        assert_eq!(p.apply([0.0, 0.0, 0.0]), [1.0, 2.0, 3.0]);
        let mut scaled = *Pose::IDENTITY.as_row_major();
        scaled[0] = 2.0;
        assert!(Pose::from_row_major(scaled).is_err());
        let mut mirror = *Pose::IDENTITY.as_row_major();
        mirror[0] = -1.0;
        assert!(Pose::from_row_major(mirror).is_err());
        let rot_z = [0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.];
        let r = Pose::from_row_major(rot_z).unwrap();
        assert_eq!(r.apply([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]);
    }
}
