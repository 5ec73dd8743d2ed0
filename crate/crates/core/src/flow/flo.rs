//! Middlebury `.flo`: magic `202021.25`, `i32` width and height, then
//! interleaved `(u, v)` `f32` pairs, all little-endian.

use std::path::Path;

use super::FlowField;
use crate::error::{Error, Result};

pub const FLO_MAGIC: f32 = 202021.25;

pub fn decode_flo(bytes: &[u8]) -> Result<FlowField> {
    let word = |i: usize| -> Result<[u8; 4]> {
        bytes
            .get(4 * i..4 * i + 4)
            .map(|s| [s[0], s[1], s[2], s[3]])
            .ok_or_else(|| Error::codec(bytes.len(), "truncated header"))
    };
    if f32::from_le_bytes(word(0)?) != FLO_MAGIC {
        return Err(Error::codec(0, "bad .flo magic"));
    }
    let width = i32::from_le_bytes(word(1)?);
    let height = i32::from_le_bytes(word(2)?);
    if width <= 0 || height <= 0 || width > 1 << 16 || height > 1 << 16 {
        return Err(Error::codec(4, format!("invalid .flo dimensions {width}x{height}")));
    }
    let (w, h) = (width as usize, height as usize);
    let payload = &bytes[12..];
    let needed = w * h * 8;
    if payload.len() < needed {
        return Err(Error::codec(
            12 + payload.len(),
            format!("truncated payload: expected {needed} bytes, found {}", payload.len()),
        ));
    }
    let mut data = Vec::with_capacity(w * h);
    for (i, px) in payload[..needed].chunks_exact(8).enumerate() {
        let u = f32::from_le_bytes([px[0], px[1], px[2], px[3]]);
        let v = f32::from_le_bytes([px[4], px[5], px[6], px[7]]);
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::codec(12 + 8 * i, "non-finite flow component"));
        }
        data.push([u, v]);
    }
    FlowField::new(w, h, data)
}

pub fn encode_flo(flow: &FlowField) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * flow.data().len());
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(flow.width() as i32).to_le_bytes());
    out.extend_from_slice(&(flow.height() as i32).to_le_bytes());
    for [u, v] in flow.data() {
        out.extend_from_slice(&u.to_le_bytes());
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_flo(path: impl AsRef<Path>) -> Result<FlowField> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_flo(&bytes)
}

pub fn write_flo(flow: &FlowField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_flo(flow)).map_err(|e| Error::io(path, e))
}
