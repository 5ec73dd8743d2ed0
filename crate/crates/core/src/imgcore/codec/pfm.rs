//! Single-channel Portable Float Map (`Pf`).
//!
//! Rows are stored bottom-up on disk and top-down in memory. The scale
//! field's sign selects endianness (negative = little-endian). Infinite
//! samples (the Middlebury convention for unknown ground truth) decode to
//! nodata, and nodata encodes as `+inf`.

use std::path::Path;

use super::header::HeaderReader;
use crate::error::{Error, Result};
use crate::imgcore::FloatMap;

pub fn decode_pfm(bytes: &[u8]) -> Result<FloatMap> {
    let mut hdr = HeaderReader::new(bytes, false);
    match hdr.token("magic")? {
        "Pf" => {}
        other => return Err(Error::codec(0, format!("unsupported PFM magic {other:?}"))),
    }
    let width = hdr.dimension("width")?;
    let height = hdr.dimension("height")?;
    let (scale_at, scale_tok) = hdr.token_at("scale")?;
    let scale: f32 = scale_tok
        .parse()
        .map_err(|_| Error::codec(scale_at, "malformed header: bad scale"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::codec(scale_at, format!("invalid PFM scale {scale}")));
    }
    let little_endian = scale < 0.0;
    let start = hdr.end_of_header()?;
    let needed = width * height * 4;
    let payload = &bytes[start..];
    if payload.len() < needed {
        return Err(Error::codec(
            start + payload.len(),
            format!("truncated payload: expected {needed} bytes, found {}", payload.len()),
        ));
    }
    let mut data = vec![0.0f32; width * height];
    for (i, chunk) in payload[..needed].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (x, file_row) = (i % width, i / width);
        data[(height - 1 - file_row) * width + x] = v;
    }
    FloatMap::new(width, height, data)
}

/// Encodes little-endian (scale `-1.0`).
pub fn encode_pfm(map: &FloatMap) -> Vec<u8> {
    let (w, h) = map.dims();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 4);
    for row in map.data().chunks_exact(w).rev() {
        for &v in row {
            let v = if v.is_finite() { v } else { f32::INFINITY };
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_pfm(path: impl AsRef<Path>) -> Result<FloatMap> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pfm(&bytes)
}

pub fn write_pfm(map: &FloatMap, path: impl AsRef<Path>) -> Result<()> {
    super::write_bytes(path.as_ref(), &encode_pfm(map))
}
