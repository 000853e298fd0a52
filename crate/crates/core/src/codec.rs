//! Little-endian byte encoding shared by every serializable structure.

use crate::error::{Error, Result};

/// Structures that can be written to and restored from the index byte format.
pub trait Persist: Sized {
    fn write_to(&self, out: &mut Vec<u8>);
    fn read_from(r: &mut Reader<'_>) -> Result<Self>;

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out);
        out
    }

    /// Serialized size in bytes.
    fn size_bytes(&self) -> usize {
        self.to_bytes().len()
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::read_from(&mut r)?;
        if !r.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", r.remaining())));
        }
        Ok(v)
    }
}

pub(crate) fn put_u8(out: &mut Vec<u8>, v: u8) {
    out.push(v);
}

pub(crate) fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Length-prefixed word array.
pub(crate) fn put_words(out: &mut Vec<u8>, words: &[u64]) {
    put_u64(out, words.len() as u64);
    out.reserve(words.len() * 8);
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

pub(crate) fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    put_u64(out, bytes.len() as u64);
    out.extend_from_slice(bytes);
}

/// Cursor over a serialized byte slice.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Format(format!(
                "unexpected end of data: need {n} bytes at offset {}, have {}",
                self.pos,
                self.remaining()
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Reads a u64 that must fit a usize and not exceed `max`.
    pub fn len_at_most(&mut self, max: u64) -> Result<usize> {
        let v = self.u64()?;
        if v > max {
            return Err(Error::Format(format!("length {v} exceeds limit {max}")));
        }
        Ok(v as usize)
    }

    pub fn words(&mut self) -> Result<Vec<u64>> {
        let len = self.len_at_most((self.remaining() / 8) as u64)?;
        let raw = self.take(len * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.len_at_most(self.remaining() as u64)?;
        self.take(len)
    }

    pub fn expect_tag(&mut self, want: u8, what: &str) -> Result<()> {
        let got = self.u8()?;
        if got != want {
            return Err(Error::Format(format!(
                "expected {what} tag {want}, found {got}"
            )));
        }
        Ok(())
    }
}
