use super::{BitBackend, IntArray, RankSelect, RawBits, SparseBitVector, TAG_RLE};
use crate::codec::{put_u64, put_u8, Persist, Reader};
use crate::error::{Error, Result};

/// Run-length encoded bitvector.
///
/// Run heads (the first position of every maximal run) are kept in a
/// [`SparseBitVector`]; position 1 is always a head and run values alternate
/// starting from `first`. One fixed-width count per run records the ones that
/// precede it, so rank is a predecessor search on the heads plus one lookup.
/// Space grows with the number of runs, not with `len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RleBitVector {
    len: usize,
    ones: usize,
    first: bool,
    heads: SparseBitVector,
    ones_before: IntArray,
}

impl RleBitVector {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let raw: RawBits = bits.into_iter().collect();
        Self::from_raw_bits(&raw)
    }

    pub fn from_raw_bits(raw: &RawBits) -> Self {
        let len = raw.len();
        if len == 0 {
            return Self::from_runs(false, &[]).unwrap();
        }
        let mut heads = vec![1usize];
        let mut carry = raw.get(0);
        for (wi, &w) in raw.words().iter().enumerate() {
            let mut changes = w ^ ((w << 1) | u64::from(carry));
            carry = w >> 63 == 1;
            let valid = (len - wi * 64).min(64);
            if valid < 64 {
                changes &= (1u64 << valid) - 1;
            }
            while changes != 0 {
                let b = changes.trailing_zeros() as usize;
                let pos = wi * 64 + b + 1;
                if pos > 1 {
                    heads.push(pos);
                }
                changes &= changes - 1;
            }
        }
        Self::from_heads(len, raw.get(0), &heads)
    }

    /// Builds from the value of the first run and the length of every run.
    /// Runs alternate in value, so every length must be positive.
    pub fn from_runs(first: bool, run_lengths: &[usize]) -> Result<Self> {
        let mut heads = Vec::with_capacity(run_lengths.len());
        let mut pos = 1;
        for &l in run_lengths {
            if l == 0 {
                return Err(Error::Construction("zero-length run".into()));
            }
            heads.push(pos);
            pos += l;
        }
        Ok(Self::from_heads(pos - 1, first, &heads))
    }

    fn from_heads(len: usize, first: bool, heads: &[usize]) -> Self {
        let mut counts = Vec::with_capacity(heads.len());
        let mut ones = 0usize;
        for (k, &h) in heads.iter().enumerate() {
            counts.push(ones as u64);
            let end = heads.get(k + 1).copied().unwrap_or(len + 1);
            if first ^ (k % 2 == 1) {
                ones += end - h;
            }
        }
        let mut ones_before = IntArray::with_capacity(super::bit_width(ones as u64), counts.len());
        for c in counts {
            ones_before.push(c);
        }
        Self {
            len,
            ones,
            first,
            heads: SparseBitVector::from_sorted_unchecked(len, heads),
            ones_before,
        }
    }

    pub fn run_count(&self) -> usize {
        self.ones_before.len()
    }

    #[inline]
    fn run_value(&self, k: usize) -> bool {
        // k is 1-based
        self.first ^ ((k - 1) % 2 == 1)
    }

    #[inline]
    fn run_start(&self, k: usize) -> usize {
        self.heads.select1(k).unwrap()
    }

    /// Largest run `k` whose preceding count (by `before`) is below `j`.
    fn last_run_below(&self, j: usize, before: impl Fn(usize) -> usize) -> usize {
        let (mut a, mut b) = (1usize, self.run_count());
        while a < b {
            let mid = (a + b).div_ceil(2);
            if before(mid) < j {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        a
    }
}

impl RankSelect for RleBitVector {
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
        self.run_value(self.heads.rank1(idx + 1))
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        let k = self.heads.rank1(i);
        let before = self.ones_before.get(k - 1) as usize;
        if self.run_value(k) {
            before + i - self.run_start(k) + 1
        } else {
            before
        }
    }

    fn select1(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.ones {
            return None;
        }
        let k = self.last_run_below(j, |k| self.ones_before.get(k - 1) as usize);
        debug_assert!(self.run_value(k));
        Some(self.run_start(k) + (j - self.ones_before.get(k - 1) as usize) - 1)
    }

    fn select0(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.len - self.ones {
            return None;
        }
        let zeros_before = |k: usize| self.run_start(k) - 1 - self.ones_before.get(k - 1) as usize;
        let k = self.last_run_below(j, zeros_before);
        debug_assert!(!self.run_value(k));
        Some(self.run_start(k) + (j - zeros_before(k)) - 1)
    }
}

impl BitBackend for RleBitVector {
    const TAG: u8 = TAG_RLE;
    const NAME: &'static str = "rle";

    fn from_raw(raw: &RawBits) -> Self {
        Self::from_raw_bits(raw)
    }
}

impl Persist for RleBitVector {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u8(out, TAG_RLE);
        put_u64(out, self.len as u64);
        put_u64(out, self.run_count() as u64);
        put_u8(out, u8::from(self.first));
        self.heads.write_to(out);
        self.ones_before.write_to(out);
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(TAG_RLE, "rle bitvector")?;
        let len = r.len_at_most(u64::MAX >> 8)?;
        let runs = r.len_at_most(len as u64)?;
        let first = match r.u8()? {
            0 => false,
            1 => true,
            b => return Err(Error::Format(format!("rle first-bit byte {b}"))),
        };
        let heads = SparseBitVector::read_from(r)?;
        let ones_before = IntArray::read_from(r)?;
        if heads.len() != len || heads.count_ones() != runs || ones_before.len() != runs {
            return Err(Error::Format("rle bitvector components disagree".into()));
        }
        if len > 0 && heads.select1(1) != Some(1) {
            return Err(Error::Format("rle bitvector must start a run at 1".into()));
        }
        let mut v = Self {
            len,
            ones: 0,
            first,
            heads,
            ones_before,
        };
        v.ones = if runs == 0 {
            0
        } else {
            let last_before = v.ones_before.get(runs - 1) as usize;
            if v.run_value(runs) {
                last_before + len - v.run_start(runs) + 1
            } else {
                last_before
            }
        };
        Ok(v)
    }
}
