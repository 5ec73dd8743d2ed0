//! 8-bit PNG through the `image` crate.

use std::io::Cursor;

use image::{DynamicImage, ImageFormat as Fmt};

use super::{quantize, Image};
use crate::error::{Error, Result};
use crate::imgcore::{ColorImage, GrayImage};

pub fn decode_png(bytes: &[u8]) -> Result<Image> {
    let decoded = image::load_from_memory_with_format(bytes, Fmt::Png)
        .map_err(|e| Error::codec(0, format!("png: {e}")))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let scale = 1.0 / 255.0;
    match decoded {
        DynamicImage::ImageLuma8(buf) => Ok(Image::Gray(GrayImage::new(
            w,
            h,
            buf.into_raw().into_iter().map(|b| b as f32 * scale).collect(),
        )?)),
        DynamicImage::ImageLumaA8(_) => {
            let buf = decoded.to_luma8();
            Ok(Image::Gray(GrayImage::new(
                w,
                h,
                buf.into_raw().into_iter().map(|b| b as f32 * scale).collect(),
            )?))
        }
        DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => {
            let buf = decoded.to_rgb8();
            Ok(Image::Color(ColorImage::new(
                w,
                h,
                buf.into_raw().into_iter().map(|b| b as f32 * scale).collect(),
            )?))
        }
        other => Err(Error::codec(
            0,
            format!("unsupported bit depth: png color type {:?}", other.color()),
        )),
    }
}

fn encode(img: DynamicImage) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, Fmt::Png)
        .map_err(|e| Error::codec(0, format!("png: {e}")))?;
    Ok(out.into_inner())
}

pub fn encode_png_gray(img: &GrayImage) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img.data().iter().map(|&v| quantize(v)).collect();
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, raw)
        .ok_or_else(|| Error::Dimension("png buffer size mismatch".into()))?;
    encode(DynamicImage::ImageLuma8(buf))
}

pub fn encode_png_color(img: &ColorImage) -> Result<Vec<u8>> {
    let raw: Vec<u8> = img.data().iter().map(|&v| quantize(v)).collect();
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, raw)
        .ok_or_else(|| Error::Dimension("png buffer size mismatch".into()))?;
    encode(DynamicImage::ImageRgb8(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_round_trip_within_quantization() {
        let img = GrayImage::from_fn(5, 3, |x, y| (x * 3 + y) as f32 / 20.0);
        let back = decode_png(&encode_png_gray(&img).unwrap()).unwrap().into_gray();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }

    #[test]
    fn garbage_is_codec_error() {
        assert!(matches!(decode_png(b"\x89PNG\r\n\x1a\nxx"), Err(Error::Codec { .. })));
    }
}
