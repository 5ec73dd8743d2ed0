use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::imgcore::GrayImage;

/// Three consecutive quarter-scale frames centred on `middle`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyframeWindow {
    pub past: GrayImage,
    pub middle: GrayImage,
    pub future: GrayImage,
}

/// Sliding three-frame buffer; one full window per push once primed.
#[derive(Debug, Clone, Default)]
pub struct KeyframeBuffer {
    frames: VecDeque<GrayImage>,
}

impl KeyframeBuffer {
    pub const CAPACITY: usize = 3;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn push(&mut self, frame: GrayImage) -> Result<Option<KeyframeWindow>> {
        if let Some(prev) = self.frames.back() {
            if prev.dims() != frame.dims() {
                return Err(Error::Input(format!(
                    "frame {:?} does not match window frames {:?}",
                    frame.dims(),
                    prev.dims()
                )));
            }
        }
        if self.frames.len() == Self::CAPACITY {
            self.frames.pop_front();
        }
        self.frames.push_back(frame);
        Ok((self.frames.len() == Self::CAPACITY).then(|| KeyframeWindow {
            past: self.frames[0].clone(),
            middle: self.frames[1].clone(),
            future: self.frames[2].clone(),
        }))
    }
}
