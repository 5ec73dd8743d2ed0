//! Byte-level codecs for rasters and float maps.
//!
//! Every decoder has a slice entry point (`decode_*`) that never panics on
//! arbitrary input, plus a path-based convenience wrapper.

mod header;
pub mod pfm;
pub mod png;
pub mod pnm;

use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::{ColorImage, GrayImage};

pub use pfm::{decode_pfm, encode_pfm, read_pfm, write_pfm};
pub use pnm::{decode_pnm, encode_pgm, encode_ppm};

/// Raster container formats understood by [`read_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Ppm,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(Self::Pgm),
            Some("ppm") => Ok(Self::Ppm),
            Some("png") => Ok(Self::Png),
            _ => Err(Error::Input(format!(
                "{}: unknown image extension (expected pgm, ppm or png)",
                path.display()
            ))),
        }
    }
}

/// A decoded raster, keeping the channel count of the source.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    Gray(GrayImage),
    Color(ColorImage),
}

impl Image {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Image::Gray(g) => g.dims(),
            Image::Color(c) => c.dims(),
        }
    }

    pub fn into_gray(self) -> GrayImage {
        match self {
            Image::Gray(g) => g,
            Image::Color(c) => c.to_gray(),
        }
    }

    pub fn into_color(self) -> ColorImage {
        match self {
            Image::Gray(g) => g.to_color(),
            Image::Color(c) => c,
        }
    }
}

pub fn decode_image(bytes: &[u8], format: ImageFormat) -> Result<Image> {
    match format {
        ImageFormat::Pgm | ImageFormat::Ppm => {
            let img = decode_pnm(bytes)?;
            match (format, &img) {
                (ImageFormat::Pgm, Image::Gray(_)) | (ImageFormat::Ppm, Image::Color(_)) => Ok(img),
                _ => Err(Error::codec(0, format!("magic does not match {format:?}"))),
            }
        }
        ImageFormat::Png => png::decode_png(bytes),
    }
}

pub fn read_image(path: impl AsRef<Path>, format: ImageFormat) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, format)
}

/// Reads an image, picking the format from the file extension.
pub fn read_image_auto(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    read_image(path, ImageFormat::from_path(path)?)
}

pub fn write_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match ImageFormat::from_path(path)? {
        ImageFormat::Png => png::encode_png_gray(img)?,
        _ => encode_pgm(img),
    };
    write_bytes(path, &bytes)
}

pub fn write_color(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match ImageFormat::from_path(path)? {
        ImageFormat::Png => png::encode_png_color(img)?,
        _ => encode_ppm(img),
    };
    write_bytes(path, &bytes)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[inline]
pub(crate) fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
