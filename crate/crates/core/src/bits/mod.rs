//! Bitvectors with access/rank/select in three physical encodings.
//!
//! Positions are 1-based in the checked API: `access(i)` reads bit `i` in
//! `1..=n`, `rank(b, i)` counts `b` among positions `1..=i` (so `i = 0` is the
//! empty prefix) and `select(b, j)` returns the position of the `j`-th `b`.
//! The unchecked primitives (`get`, `rank1`, `select1`, ...) are what the
//! wavelet trees call on their hot paths; `rank1(i)` there means "ones among
//! the first `i` bits", which is the same number.

mod int_array;
mod plain;
mod rle;
mod sparse;

pub use int_array::IntArray;
pub use plain::PlainBitVector;
pub use rle::RleBitVector;
pub use sparse::SparseBitVector;

use crate::codec::Persist;
use crate::error::{check_range, Error, Result};

pub(crate) const TAG_PLAIN: u8 = 0;
pub(crate) const TAG_ELIAS_FANO: u8 = 1;
pub(crate) const TAG_RLE: u8 = 2;

/// Static binary sequence supporting access, rank and select.
pub trait RankSelect {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn count_ones(&self) -> usize;

    /// Bit at 0-based index `idx < len`.
    fn get(&self, idx: usize) -> bool;

    /// Number of ones among the first `i` bits, `i <= len`.
    fn rank1(&self, i: usize) -> usize;

    #[inline]
    fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// 1-based position of the `j`-th one, `1 <= j <= count_ones`.
    fn select1(&self, j: usize) -> Option<usize>;

    /// 1-based position of the `j`-th zero.
    fn select0(&self, j: usize) -> Option<usize>;

    fn access(&self, i: usize) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::OutOfRange {
                pos: i as u64,
                lo: 1,
                hi: 0,
            });
        }
        check_range(i, 1, self.len())?;
        Ok(self.get(i - 1))
    }

    fn rank(&self, bit: bool, i: usize) -> Result<usize> {
        check_range(i, 0, self.len())?;
        Ok(if bit { self.rank1(i) } else { self.rank0(i) })
    }

    fn select(&self, bit: bool, j: usize) -> Result<usize> {
        if j == 0 {
            return Err(Error::OutOfRange {
                pos: 0,
                lo: 1,
                hi: u64::MAX,
            });
        }
        let found = if bit { self.select1(j) } else { self.select0(j) };
        found.ok_or_else(|| Error::NotFound {
            what: format!("bit {}", u8::from(bit)),
            ordinal: j as u64,
            total: if bit {
                self.count_ones()
            } else {
                self.len() - self.count_ones()
            } as u64,
        })
    }
}

/// A bitvector encoding usable as a wavelet-tree level.
pub trait BitBackend: RankSelect + Persist + Send + Sync {
    /// Backend identifier written into serialized wavelet trees.
    const TAG: u8;
    const NAME: &'static str;

    fn from_raw(raw: &RawBits) -> Self;
}

/// Growable, uncompressed bit buffer used to stage construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawBits {
    words: Vec<u64>,
    len: usize,
}

impl RawBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Sets 0-based index `idx`.
    #[inline]
    pub fn set(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    #[inline]
    pub fn get(&self, idx: usize) -> bool {
        (self.words[idx / 64] >> (idx % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl FromIterator<bool> for RawBits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut raw = RawBits::new();
        for b in iter {
            raw.push(b);
        }
        raw
    }
}

/// 0-based index of the `k`-th (0-based) set bit of `w`. Requires `k < popcount(w)`.
#[inline]
pub(crate) fn select_in_word(w: u64, mut k: u32) -> u32 {
    let mut shift = 0;
    loop {
        let byte = (w >> shift) & 0xff;
        let c = byte.count_ones();
        if k < c {
            let mut b = byte;
            for _ in 0..k {
                b &= b - 1;
            }
            return shift + b.trailing_zeros();
        }
        k -= c;
        shift += 8;
        debug_assert!(shift < 64, "select_in_word past end");
    }
}

/// Bits needed to write any value in `0..=max`.
#[inline]
pub(crate) fn bit_width(max: u64) -> u32 {
    64 - max.leading_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_in_word_matches_scan() {
        let words = [1u64, 0x8000_0000_0000_0000, u64::MAX, 0xdead_beef_0ff0_1234];
        for &w in &words {
            let ones: Vec<u32> = (0..64).filter(|b| (w >> b) & 1 == 1).collect();
            for (k, &pos) in ones.iter().enumerate() {
                assert_eq!(select_in_word(w, k as u32), pos);
            }
        }
    }

    #[test]
    fn widths() {
        assert_eq!(bit_width(0), 0);
        assert_eq!(bit_width(1), 1);
        assert_eq!(bit_width(16), 5);
        assert_eq!(bit_width(u64::MAX), 64);
    }
}
