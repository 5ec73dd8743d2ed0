//! Sequence manifests: one frame per line, `index<TAB>left<TAB>right[<TAB>pose16]`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dco_core::occlude::Pose;
use dco_core::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub index: u64,
    pub left: PathBuf,
    pub right: PathBuf,
    /// Rigid transform applied to the virtual mesh for this frame.
    pub pose: Option<Pose>,
}

/// Parses manifest text. Relative image paths are resolved against `base`.
/// Blank lines and `#` comments are skipped. The pose is 16 row-major
/// numbers, either tab-separated or whitespace-separated in one field.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<FrameRecord>> {
    let mut frames: Vec<FrameRecord> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(Error::Input(format!("manifest line {lineno}: expected index, left and right paths")));
        }
        let index: u64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("manifest line {lineno}: bad frame index {:?}", fields[0])))?;
        if let Some(prev) = frames.last() {
            if index <= prev.index {
                return Err(Error::Input(format!(
                    "manifest line {lineno}: frame index {index} does not increase past {}",
                    prev.index
                )));
            }
        }
        let path = |s: &str| -> Result<PathBuf> {
            let s = s.trim();
            if s.is_empty() {
                return Err(Error::Input(format!("manifest line {lineno}: empty path")));
            }
            let p = Path::new(s);
            Ok(if p.is_absolute() { p.to_path_buf() } else { base.join(p) })
        };
        let pose = if fields.len() > 3 {
            let nums = fields[3..]
                .iter()
                .flat_map(|f| f.split_whitespace())
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Input(format!("manifest line {lineno}: pose entries must be numbers")))?;
            match nums.len() {
                0 => None,
                16 => Some(
                    Pose::from_row_major(nums.try_into().expect("length checked"))
                        .map_err(|e| Error::Input(format!("manifest line {lineno}: {e}")))?,
                ),
                k => return Err(Error::Input(format!("manifest line {lineno}: pose needs 16 numbers, got {k}"))),
            }
        } else {
            None
        };
        frames.push(FrameRecord { index, left: path(fields[1])?, right: path(fields[2])?, pose });
    }
    Ok(frames)
}

/// Byte-level entry point: the manifest must be UTF-8.
pub fn decode_manifest(bytes: &[u8], base: &Path) -> Result<Vec<FrameRecord>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Input(format!("manifest is not UTF-8 (byte {})", e.valid_up_to())))?;
    parse_manifest(text, base)
}

pub fn read_manifest(path: &Path) -> Result<Vec<FrameRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    decode_manifest(&bytes, path.parent().unwrap_or(Path::new(".")))
}

/// Serializes records with paths as given (no relativisation).
pub fn format_manifest(frames: &[FrameRecord]) -> String {
    let mut out = String::new();
    for f in frames {
        let _ = write!(out, "{}\t{}\t{}", f.index, f.left.display(), f.right.display());
        if let Some(p) = &f.pose {
            for v in p.as_row_major() {
                let _ = write!(out, "\t{v}");
            }
        }
        out.push('\n');
    }
    out
}
