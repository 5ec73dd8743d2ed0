use crate::error::{Error, Result};
use crate::imgcore::FloatMap;

/// Non-negative per-pixel amplitude (flow-gradient or fused confidence).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMap {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl AmplitudeMap {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "amplitude map {width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Input(format!("amplitude {v} is negative or non-finite")));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub(crate) fn from_vec_unchecked(width: usize, height: usize, data: Vec<f32>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { width, height, data }
    }

    /// Nodata samples become zero amplitude.
    pub fn from_float_map(map: &FloatMap) -> Result<Self> {
        let data = map.data().iter().map(|&v| if v.is_finite() { v } else { 0.0 }).collect();
        Self::new(map.width(), map.height(), data)
    }

    pub fn to_float_map(&self) -> FloatMap {
        FloatMap::new(self.width, self.height, self.data.clone()).expect("dimensions checked")
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn max(&self) -> f32 {
        self.data.iter().copied().fold(0.0, f32::max)
    }

    /// Sample at the quarter-scale location of full-resolution pixel `(x, y)`.
    #[inline]
    pub fn at_full_res(&self, x: usize, y: usize) -> f32 {
        let (qx, qy) = quarter_coords(x, y, self.width, self.height);
        self.get(qx, qy)
    }
}

/// Maps a full-resolution pixel to its quarter-scale cell `(x/2, y/2)`,
/// clamped for odd full-resolution sizes.
#[inline]
pub fn quarter_coords(x: usize, y: usize, quarter_w: usize, quarter_h: usize) -> (usize, usize) {
    ((x / 2).min(quarter_w - 1), (y / 2).min(quarter_h - 1))
}

/// Binary full-resolution depth-contour mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl EdgeMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "mask {width}x{height} needs {} entries, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let data = (0..width * height).map(|i| f(i % width, i / width)).collect();
        Self { width, height, data }
    }

    /// Reads a 0/255 PGM (any non-zero sample counts as set).
    pub fn decode_pgm(bytes: &[u8]) -> Result<Self> {
        let img = crate::imgcore::codec::decode_pnm(bytes)?.into_gray();
        Ok(Self {
            width: img.width(),
            height: img.height(),
            data: img.data().iter().map(|&v| v > 0.0).collect(),
        })
    }

    pub fn encode_pgm(&self) -> Vec<u8> {
        crate::imgcore::codec::pnm::encode_mask_pgm(self.width, self.height, &self.data)
    }

    pub fn read_pgm(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode_pgm(&bytes)
    }

    pub fn write_pgm(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        crate::imgcore::codec::write_bytes(path.as_ref(), &self.encode_pgm())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Canny gradient magnitude normalized to `[0, 1]` by its frame maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityGradientMap(FloatMap);

impl IntensityGradientMap {
    pub fn new(map: FloatMap) -> Result<Self> {
        if map.data().iter().any(|v| !(v.is_finite() && (0.0..=1.0).contains(v))) {
            return Err(Error::Input("intensity gradients must lie in [0,1]".into()));
        }
        Ok(Self(map))
    }

    pub fn map(&self) -> &FloatMap {
        &self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.0.get(x, y)
    }
}
