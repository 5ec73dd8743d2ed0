use crate::error::{Error, Result};

/// Whitespace-separated ASCII header tokenizer shared by the PNM and PFM codecs.
pub(crate) struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    allow_comments: bool,
}

impl<'a> HeaderReader<'a> {
    pub(crate) fn new(bytes: &'a [u8], allow_comments: bool) -> Self {
        Self {
            bytes,
            pos: 0,
            allow_comments,
        }
    }

    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' && self.allow_comments {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn token(&mut self, what: &str) -> Result<&'a str> {
        self.token_at(what).map(|(_, t)| t)
    }

    /// Next token with the byte offset where it starts.
    pub(crate) fn token_at(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.skip_space();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || (b == b'#' && self.allow_comments) {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::codec(start, format!("malformed header: missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map(|t| (start, t))
            .map_err(|_| Error::codec(start, format!("malformed header: non-ASCII {what}")))
    }

    pub(crate) fn dimension(&mut self, what: &str) -> Result<usize> {
        let (start, tok) = self.token_at(what)?;
        match tok.parse::<usize>() {
            Ok(v) if v > 0 && v <= 1 << 16 => Ok(v),
            _ => Err(Error::codec(start, format!("malformed header: bad {what} {tok:?}"))),
        }
    }

    /// Consumes the single whitespace byte that separates the header from the payload.
    pub(crate) fn end_of_header(&mut self) -> Result<usize> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(self.pos)
            }
            _ => Err(Error::codec(self.pos, "malformed header: missing separator before payload")),
        }
    }
}
