use crate::codec::{put_u64, put_u8, put_words, Persist, Reader};
use crate::error::{Error, Result};

/// Packed array of unsigned integers of one fixed bit width.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntArray {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

impl IntArray {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64);
        Self {
            words: Vec::new(),
            width,
            len: 0,
        }
    }

    pub fn with_capacity(width: u32, len: usize) -> Self {
        let mut a = Self::new(width);
        a.words.reserve((len * width as usize).div_ceil(64));
        a
    }

    /// Packs `values` using the smallest width that holds their maximum.
    pub fn from_slice(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let mut a = Self::with_capacity(super::bit_width(max), values.len());
        for &v in values {
            a.push(v);
        }
        a
    }

    pub fn push(&mut self, v: u64) {
        let w = self.width as usize;
        debug_assert!(w == 64 || v >> w == 0, "value {v} wider than {w} bits");
        if w == 0 {
            self.len += 1;
            return;
        }
        let bit = self.len * w;
        let (word, off) = (bit / 64, bit % 64);
        if word >= self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= v << off;
        if off + w > 64 {
            self.words.push(v >> (64 - off));
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let w = self.width as usize;
        if w == 0 {
            return 0;
        }
        let bit = i * w;
        let (word, off) = (bit / 64, bit % 64);
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        let lo = self.words[word] >> off;
        if off + w <= 64 {
            lo & mask
        } else {
            (lo | (self.words[word + 1] << (64 - off))) & mask
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub(crate) fn raw_words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_parts(words: Vec<u64>, width: u32, len: usize) -> Result<Self> {
        if width > 64 {
            return Err(Error::Format(format!("int array width {width}")));
        }
        if words.len() != (len * width as usize).div_ceil(64) {
            return Err(Error::Format("int array payload length mismatch".into()));
        }
        Ok(Self { words, width, len })
    }
}

impl Persist for IntArray {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u8(out, self.width as u8);
        put_u64(out, self.len as u64);
        put_words(out, &self.words);
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let width = r.u8()? as u32;
        let len = r.len_at_most(u64::MAX >> 8)?;
        let words = r.words()?;
        Self::from_parts(words, width, len)
    }
}
