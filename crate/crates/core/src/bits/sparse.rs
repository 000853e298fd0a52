use super::plain::read_plain_body;
use super::{IntArray, PlainBitVector, RankSelect, RawBits, TAG_ELIAS_FANO, TAG_PLAIN};
use crate::codec::{put_u64, put_u8, put_words, Persist, Reader};
use crate::error::{Error, Result};

/// Sparse bitvector stored as an Elias-Fano coded set of one-positions.
///
/// When more than a quarter of the bits are set the Elias-Fano form stops
/// paying off and the vector is kept as a [`PlainBitVector`] instead; both
/// forms answer the same queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBitVector {
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    EliasFano(EliasFano),
    Plain(PlainBitVector),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct EliasFano {
    universe: usize,
    low: IntArray,
    high: PlainBitVector,
    low_width: u32,
}

impl SparseBitVector {
    /// Builds from strictly increasing 1-based positions inside `1..=n`.
    pub fn new(n: usize, positions: &[usize]) -> Result<Self> {
        let mut prev = 0;
        for &p in positions {
            if p <= prev {
                return Err(Error::Construction(format!(
                    "one-positions must be strictly increasing and >= 1 (saw {p} after {prev})"
                )));
            }
            if p > n {
                return Err(Error::Construction(format!(
                    "one-position {p} outside universe {n}"
                )));
            }
            prev = p;
        }
        Ok(Self::from_sorted_unchecked(n, positions))
    }

    pub(crate) fn from_sorted_unchecked(n: usize, positions: &[usize]) -> Self {
        let m = positions.len();
        if m > n / 4 {
            let mut raw = RawBits::zeros(n);
            for &p in positions {
                raw.set(p - 1);
            }
            return Self {
                repr: Repr::Plain(PlainBitVector::from_raw_bits(&raw)),
            };
        }
        let low_width = n.checked_div(m).map_or(0, |q| q.ilog2());
        let high_len = m + (n >> low_width) + 1;
        let mut high = RawBits::zeros(high_len);
        let mut low = IntArray::with_capacity(low_width, m);
        let mask = (1u64 << low_width) - 1;
        for (i, &p) in positions.iter().enumerate() {
            let x = (p - 1) as u64;
            low.push(x & mask);
            high.set((x >> low_width) as usize + i);
        }
        Self {
            repr: Repr::EliasFano(EliasFano {
                universe: n,
                low,
                high: PlainBitVector::from_raw_bits(&high),
                low_width,
            }),
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let raw: RawBits = bits.into_iter().collect();
        Self::from_raw_bits(&raw)
    }

    pub fn from_raw_bits(raw: &RawBits) -> Self {
        let positions: Vec<usize> = (0..raw.len()).filter(|&i| raw.get(i)).map(|i| i + 1).collect();
        Self::from_sorted_unchecked(raw.len(), &positions)
    }

    /// True when the Elias-Fano encoding is in use (not the dense fallback).
    pub fn is_elias_fano(&self) -> bool {
        matches!(self.repr, Repr::EliasFano(_))
    }

    /// 1-based positions of all ones, in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.count_ones()).map(move |j| self.select1(j).unwrap())
    }
}

impl EliasFano {
    #[inline]
    fn m(&self) -> usize {
        self.low.len()
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        if i >= self.universe {
            return self.m();
        }
        let hi = i >> self.low_width;
        let lo = (i as u64) & ((1u64 << self.low_width) - 1);
        // first bit of bucket `hi` sits right after its hi-th zero
        let mut b = if hi == 0 { 0 } else { self.high.select0(hi).unwrap() };
        let mut count = b - hi;
        while b < self.high.len() && self.high.get(b) && self.low.get(count) < lo {
            count += 1;
            b += 1;
        }
        count
    }

    #[inline]
    fn select1(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.m() {
            return None;
        }
        let hpos = self.high.select1(j)? - 1;
        let hi = (hpos - (j - 1)) as u64;
        Some(((hi << self.low_width) | self.low.get(j - 1)) as usize + 1)
    }

    fn select0(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.universe - self.m() {
            return None;
        }
        // largest k with (zeros before the k-th one) < j
        let (mut a, mut b) = (0usize, self.m());
        while a < b {
            let mid = (a + b).div_ceil(2);
            if self.select1(mid).unwrap() - mid < j {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        Some(j + a)
    }
}

impl RankSelect for SparseBitVector {
    #[inline]
    fn len(&self) -> usize {
        match &self.repr {
            Repr::EliasFano(ef) => ef.universe,
            Repr::Plain(p) => p.len(),
        }
    }

    #[inline]
    fn count_ones(&self) -> usize {
        match &self.repr {
            Repr::EliasFano(ef) => ef.m(),
            Repr::Plain(p) => p.count_ones(),
        }
    }

    #[inline]
    fn get(&self, idx: usize) -> bool {
        match &self.repr {
            Repr::EliasFano(ef) => ef.rank1(idx + 1) > ef.rank1(idx),
            Repr::Plain(p) => p.get(idx),
        }
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        match &self.repr {
            Repr::EliasFano(ef) => ef.rank1(i),
            Repr::Plain(p) => p.rank1(i),
        }
    }

    #[inline]
    fn select1(&self, j: usize) -> Option<usize> {
        match &self.repr {
            Repr::EliasFano(ef) => ef.select1(j),
            Repr::Plain(p) => p.select1(j),
        }
    }

    fn select0(&self, j: usize) -> Option<usize> {
        match &self.repr {
            Repr::EliasFano(ef) => ef.select0(j),
            Repr::Plain(p) => p.select0(j),
        }
    }
}

impl Persist for SparseBitVector {
    fn write_to(&self, out: &mut Vec<u8>) {
        match &self.repr {
            Repr::Plain(p) => p.write_to(out),
            Repr::EliasFano(ef) => {
                put_u8(out, TAG_ELIAS_FANO);
                put_u64(out, ef.universe as u64);
                put_u64(out, ef.m() as u64);
                put_u8(out, ef.low_width as u8);
                put_words(out, ef.low.raw_words());
                put_words(out, ef.high.words());
            }
        }
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            TAG_PLAIN => Ok(Self {
                repr: Repr::Plain(read_plain_body(r)?),
            }),
            TAG_ELIAS_FANO => {
                let universe = r.len_at_most(u64::MAX >> 8)?;
                let m = r.len_at_most(universe as u64)?;
                let low_width = r.u8()? as u32;
                if low_width >= 64 {
                    return Err(Error::Format(format!("elias-fano low width {low_width}")));
                }
                let low = IntArray::from_parts(r.words()?, low_width, m)?;
                let high_w = r.words()?;
                let high_len = m + (universe >> low_width) + 1;
                if high_w.len() != high_len.div_ceil(64) {
                    return Err(Error::Format("elias-fano payload length mismatch".into()));
                }
                let high = PlainBitVector::from_words(high_w, high_len);
                if high.count_ones() != m {
                    return Err(Error::Format("elias-fano high part count mismatch".into()));
                }
                Ok(Self {
                    repr: Repr::EliasFano(EliasFano {
                        universe,
                        low,
                        high,
                        low_width,
                    }),
                })
            }
            t => Err(Error::Format(format!("unknown sparse bitvector tag {t}"))),
        }
    }
}
