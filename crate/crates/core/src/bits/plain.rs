use super::{select_in_word, BitBackend, RankSelect, RawBits, TAG_PLAIN};
use crate::codec::{put_u64, put_u8, put_words, Persist, Reader};
use crate::error::{Error, Result};

const WORDS_PER_SUPERBLOCK: usize = 8;
const SUPERBLOCK_BITS: usize = 64 * WORDS_PER_SUPERBLOCK;
const SELECT_SAMPLE: usize = 4096;

/// Uncompressed bitvector with a two-level rank directory.
///
/// The directory keeps the absolute number of ones before every 512-bit
/// superblock; inside a superblock rank pops at most eight words. Select
/// narrows the superblock with a sample taken every 4096 ones (or zeros) and
/// binary-searches the directory between two samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainBitVector {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    superblocks: Vec<u64>,
    samples1: Vec<u32>,
    samples0: Vec<u32>,
}

impl Default for PlainBitVector {
    fn default() -> Self {
        Self::from_words(Vec::new(), 0)
    }
}

impl PlainBitVector {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let raw: RawBits = bits.into_iter().collect();
        Self::from_raw_bits(&raw)
    }

    pub fn from_raw_bits(raw: &RawBits) -> Self {
        Self::from_words(raw.words().to_vec(), raw.len())
    }

    /// Takes ownership of packed words, LSB-first. Bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        assert!(len <= words.len() * 64, "len {len} exceeds payload");
        words.truncate(len.div_ceil(64));
        if !len.is_multiple_of(64) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % 64)) - 1;
        }

        let n_super = len.div_ceil(SUPERBLOCK_BITS);
        let mut superblocks = Vec::with_capacity(n_super + 1);
        let mut acc = 0u64;
        for chunk in words.chunks(WORDS_PER_SUPERBLOCK) {
            superblocks.push(acc);
            acc += chunk.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        superblocks.push(acc);
        let ones = acc as usize;

        let mut samples1 = Vec::new();
        let mut samples0 = Vec::new();
        for sb in 0..n_super {
            let before1 = superblocks[sb] as usize;
            let after1 = superblocks[sb + 1] as usize;
            while samples1.len() * SELECT_SAMPLE < after1 {
                debug_assert!(samples1.len() * SELECT_SAMPLE >= before1);
                samples1.push(sb as u32);
            }
            let before0 = sb * SUPERBLOCK_BITS - before1;
            let after0 = ((sb + 1) * SUPERBLOCK_BITS).min(len) - after1;
            while samples0.len() * SELECT_SAMPLE < after0 {
                debug_assert!(samples0.len() * SELECT_SAMPLE >= before0);
                samples0.push(sb as u32);
            }
        }

        Self {
            words,
            len,
            ones,
            superblocks,
            samples1,
            samples0,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn n_super(&self) -> usize {
        self.superblocks.len() - 1
    }

    #[inline]
    fn zeros_before_super(&self, sb: usize) -> usize {
        sb * SUPERBLOCK_BITS - self.superblocks[sb] as usize
    }

    /// Largest superblock in the sampled window whose prefix count is <= k.
    fn locate_super(&self, k: usize, ones: bool) -> usize {
        let samples = if ones { &self.samples1 } else { &self.samples0 };
        let s = k / SELECT_SAMPLE;
        let lo = samples[s] as usize;
        let hi = samples
            .get(s + 1)
            .map(|&x| x as usize)
            .unwrap_or(self.n_super() - 1);
        let (mut a, mut b) = (lo, hi);
        // invariant: count(a) <= k, answer in [a, b]
        while a < b {
            let mid = (a + b).div_ceil(2);
            let c = if ones {
                self.superblocks[mid] as usize
            } else {
                self.zeros_before_super(mid)
            };
            if c <= k {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        a
    }
}

impl RankSelect for PlainBitVector {
    #[inline]
    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        (self.words[idx / 64] >> (idx % 64)) & 1 == 1
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let sb = i / SUPERBLOCK_BITS;
        let mut r = self.superblocks[sb] as usize;
        let end_word = i / 64;
        for w in &self.words[sb * WORDS_PER_SUPERBLOCK..end_word] {
            r += w.count_ones() as usize;
        }
        let rem = i % 64;
        if rem != 0 {
            r += (self.words[end_word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    fn select1(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.ones {
            return None;
        }
        let k = j - 1;
        let sb = self.locate_super(k, true);
        let mut rem = k - self.superblocks[sb] as usize;
        for (wi, &w) in self.words.iter().enumerate().skip(sb * WORDS_PER_SUPERBLOCK) {
            let c = w.count_ones() as usize;
            if rem < c {
                return Some(wi * 64 + select_in_word(w, rem as u32) as usize + 1);
            }
            rem -= c;
        }
        unreachable!("select1 directory inconsistent")
    }

    fn select0(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.len - self.ones {
            return None;
        }
        let k = j - 1;
        let sb = self.locate_super(k, false);
        let mut rem = k - self.zeros_before_super(sb);
        for (wi, &w) in self.words.iter().enumerate().skip(sb * WORDS_PER_SUPERBLOCK) {
            let inv = !w;
            let c = inv.count_ones() as usize;
            if rem < c {
                return Some(wi * 64 + select_in_word(inv, rem as u32) as usize + 1);
            }
            rem -= c;
        }
        unreachable!("select0 directory inconsistent")
    }
}

impl BitBackend for PlainBitVector {
    const TAG: u8 = TAG_PLAIN;
    const NAME: &'static str = "plain";

    fn from_raw(raw: &RawBits) -> Self {
        Self::from_raw_bits(raw)
    }
}

impl Persist for PlainBitVector {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u8(out, TAG_PLAIN);
        put_u64(out, self.len as u64);
        put_u64(out, self.ones as u64);
        put_words(out, &self.words);
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(TAG_PLAIN, "plain bitvector")?;
        read_plain_body(r)
    }
}

/// Reads a plain bitvector whose tag byte was already consumed.
pub(super) fn read_plain_body(r: &mut Reader<'_>) -> Result<PlainBitVector> {
    let len = r.len_at_most(u64::MAX >> 8)?;
    let ones = r.u64()? as usize;
    let words = r.words()?;
    if words.len() != len.div_ceil(64) {
        return Err(Error::Format("plain bitvector payload length mismatch".into()));
    }
    let bv = PlainBitVector::from_words(words, len);
    if bv.ones != ones {
        return Err(Error::Format(format!(
            "plain bitvector records {ones} ones, payload has {}",
            bv.ones
        )));
    }
    Ok(bv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> PlainBitVector {
        PlainBitVector::from_bits(s.chars().map(|c| c == '1'))
    }

    #[test]
    fn small_examples() {
        let v = bits("101100");
        assert_eq!(v.access(3), Ok(true));
        assert_eq!(v.access(2), Ok(false));
        assert_eq!(v.rank(true, 4), Ok(3));
        assert_eq!(v.rank(false, 6), Ok(3));
        assert_eq!(v.rank(true, 0), Ok(0));
        assert_eq!(v.rank(false, 0), Ok(0));
        assert_eq!(v.select(true, 2), Ok(3));
        assert_eq!(v.select(false, 1), Ok(2));

        let one = bits("1");
        assert_eq!(one.access(1), Ok(true));
        assert_eq!(one.select(true, 1), Ok(1));
    }

    #[test]
    fn error_kinds_are_distinct() {
        let v = bits("101100");
        assert!(matches!(v.access(0), Err(Error::OutOfRange { .. })));
        assert!(matches!(v.access(7), Err(Error::OutOfRange { .. })));
        assert!(matches!(v.rank(true, 7), Err(Error::OutOfRange { .. })));
        assert!(matches!(v.select(true, 4), Err(Error::NotFound { .. })));
        assert!(matches!(v.select(false, 4), Err(Error::NotFound { .. })));
    }

    #[test]
    fn empty_vector() {
        let v = PlainBitVector::from_bits(std::iter::empty());
        assert_eq!(v.rank(true, 0), Ok(0));
        assert!(v.access(1).is_err());
        assert!(matches!(v.select(true, 1), Err(Error::NotFound { .. })));
        assert!(matches!(v.select(false, 1), Err(Error::NotFound { .. })));
    }

    #[test]
    fn select_crosses_sample_boundaries() {
        // dense and sparse stretches so samples land in varied superblocks
        let n = 200_000;
        let v = PlainBitVector::from_bits((0..n).map(|i| i % 3 == 0 || (i / 10_000) % 2 == 1));
        let mut ones = 0;
        let mut zeros = 0;
        for i in 0..n {
            if v.get(i) {
                ones += 1;
                assert_eq!(v.select1(ones), Some(i + 1));
            } else {
                zeros += 1;
                assert_eq!(v.select0(zeros), Some(i + 1));
            }
        }
        assert_eq!(v.select1(ones + 1), None);
        assert_eq!(v.select0(zeros + 1), None);
    }

    #[test]
    fn serialization_layout() {
        let v = bits("101100");
        let bytes = v.to_bytes();
        assert_eq!(bytes[0], TAG_PLAIN);
        assert_eq!(&bytes[1..9], &6u64.to_le_bytes());
        assert_eq!(&bytes[9..17], &3u64.to_le_bytes());
        assert_eq!(&bytes[17..25], &1u64.to_le_bytes());
        // bits 1,3,4 -> LSB-first word 0b1101
        assert_eq!(&bytes[25..33], &0b1101u64.to_le_bytes());
        assert_eq!(PlainBitVector::from_bytes(&bytes).unwrap(), v);
    }
}
