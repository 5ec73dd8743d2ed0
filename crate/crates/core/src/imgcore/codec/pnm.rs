//! Binary PGM (`P5`) and PPM (`P6`) with 8-bit samples.

use super::header::HeaderReader;
use super::{quantize, Image};
use crate::error::{Error, Result};
use crate::imgcore::{ColorImage, GrayImage};

pub fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let mut hdr = HeaderReader::new(bytes, true);
    let channels = match hdr.token("magic")? {
        "P5" => 1,
        "P6" => 3,
        other => return Err(Error::codec(0, format!("unsupported magic {other:?}"))),
    };
    let width = hdr.dimension("width")?;
    let height = hdr.dimension("height")?;
    let (maxval_at, maxval_tok) = hdr.token_at("maxval")?;
    let maxval: u32 = maxval_tok
        .parse()
        .map_err(|_| Error::codec(maxval_at, "malformed header: bad maxval"))?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::codec(
            maxval_at,
            format!("unsupported bit depth: maxval {maxval} (only 8-bit samples)"),
        ));
    }
    let start = hdr.end_of_header()?;
    let needed = width * height * channels;
    let payload = &bytes[start..];
    if payload.len() < needed {
        return Err(Error::codec(
            start + payload.len(),
            format!("truncated payload: expected {needed} bytes, found {}", payload.len()),
        ));
    }
    let scale = 1.0 / maxval as f32;
    let mut samples = Vec::with_capacity(needed);
    for (i, &b) in payload[..needed].iter().enumerate() {
        if b as u32 > maxval {
            return Err(Error::codec(start + i, format!("sample {b} exceeds maxval {maxval}")));
        }
        samples.push(b as f32 * scale);
    }
    Ok(if channels == 1 {
        Image::Gray(GrayImage::new(width, height, samples)?)
    } else {
        Image::Color(ColorImage::new(width, height, samples)?)
    })
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| quantize(v)));
    out
}

pub fn encode_ppm(img: &ColorImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| quantize(v)));
    out
}

/// Binary mask as an 8-bit PGM holding 0 / 255.
pub fn encode_mask_pgm(width: usize, height: usize, mask: &[bool]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(mask.iter().map(|&m| if m { 255u8 } else { 0 }));
    out
}
