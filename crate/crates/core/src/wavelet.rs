//! Balanced wavelet tree over an integer alphabet `0..sigma`.
//!
//! The alphabet interval `[lo, hi)` of a node is split at
//! `lo + ceil((hi - lo) / 2)`; the lower half goes left (bit 0). Every level
//! is a single bitvector of exactly `n` bits holding the nodes of that depth
//! side by side in alphabet order. A node whose interval has shrunk to one
//! symbol keeps its elements in place with 0 bits on the deeper levels, so the
//! node for `[lo, hi)` always starts at `offsets[lo]`, the number of elements
//! with a symbol below `lo`. The deepest level therefore lists the elements in
//! leaf order: stably sorted by symbol.

use crate::bits::{BitBackend, PlainBitVector, RankSelect, RleBitVector, SparseBitVector};
use crate::codec::{put_u64, put_u8, put_words, Persist, Reader};
use crate::error::{check_range, Error, Result};

/// Alphabets up to this size keep their leaf offsets as a plain array.
pub const DENSE_OFFSETS_MAX_SIGMA: u32 = 1 << 16;

pub type PlainWaveletTree = WaveletTree<PlainBitVector>;
pub type RleWaveletTree = WaveletTree<RleBitVector>;

/// Cumulative symbol counts: `get(c)` = number of elements with symbol `< c`,
/// for `c` in `0..=sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafOffsets {
    Dense(Vec<u64>),
    /// One-positions at `offsets[c] + c + 1`, which keeps them strictly
    /// increasing even for absent symbols.
    Sparse(SparseBitVector),
}

impl LeafOffsets {
    pub fn from_counts(counts: &[u64]) -> Self {
        let mut cum = Vec::with_capacity(counts.len() + 1);
        let mut acc = 0u64;
        cum.push(0);
        for &c in counts {
            acc += c;
            cum.push(acc);
        }
        if counts.len() <= DENSE_OFFSETS_MAX_SIGMA as usize {
            LeafOffsets::Dense(cum)
        } else {
            let positions: Vec<usize> = cum
                .iter()
                .enumerate()
                .map(|(c, &o)| o as usize + c + 1)
                .collect();
            let universe = acc as usize + counts.len() + 1;
            LeafOffsets::Sparse(SparseBitVector::from_sorted_unchecked(universe, &positions))
        }
    }

    #[inline]
    pub fn get(&self, c: usize) -> usize {
        match self {
            LeafOffsets::Dense(v) => v[c] as usize,
            LeafOffsets::Sparse(s) => s.select1(c + 1).unwrap() - c - 1,
        }
    }

    /// Number of entries (`sigma + 1`).
    pub fn len(&self) -> usize {
        match self {
            LeafOffsets::Dense(v) => v.len(),
            LeafOffsets::Sparse(s) => s.count_ones(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Persist for LeafOffsets {
    fn write_to(&self, out: &mut Vec<u8>) {
        match self {
            LeafOffsets::Dense(v) => {
                put_u8(out, 0);
                put_words(out, v);
            }
            LeafOffsets::Sparse(s) => {
                put_u8(out, 1);
                s.write_to(out);
            }
        }
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let offsets = match r.u8()? {
            0 => LeafOffsets::Dense(r.words()?),
            1 => LeafOffsets::Sparse(SparseBitVector::read_from(r)?),
            t => return Err(Error::Format(format!("unknown leaf-offset tag {t}"))),
        };
        let len = offsets.len();
        if len == 0 || (1..len).any(|c| offsets.get(c) < offsets.get(c - 1)) {
            return Err(Error::Format("leaf offsets not cumulative".into()));
        }
        Ok(offsets)
    }
}

/// Wavelet tree generic over the bitvector used for its levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletTree<B> {
    n: usize,
    sigma: u32,
    levels: Vec<B>,
    offsets: LeafOffsets,
    /// `node_ones[d * sigma + lo]` = rank1 of level `d` at the start of the
    /// node beginning with symbol `lo`. Rebuilt on load, not serialized.
    node_ones: Vec<u64>,
}

/// Number of levels for an alphabet of `sigma` symbols.
pub fn depth_for(sigma: u32) -> usize {
    if sigma <= 1 {
        0
    } else {
        (sigma - 1).ilog2() as usize + 1
    }
}

#[inline]
fn split(lo: u32, hi: u32) -> u32 {
    lo + (hi - lo).div_ceil(2)
}

impl<B: BitBackend> WaveletTree<B> {
    pub fn build(seq: &[u32], sigma: u32) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::Construction("alphabet size must be at least 1".into()));
        }
        let mut counts = vec![0u64; sigma as usize];
        for &s in seq {
            if s >= sigma {
                return Err(Error::UnknownSymbol {
                    symbol: s as u64,
                    sigma: sigma as u64,
                });
            }
            counts[s as usize] += 1;
        }
        let offsets = LeafOffsets::from_counts(&counts);
        let depth = depth_for(sigma);

        // node_lo[c] = lower bound of the node holding c at the current depth
        let mut node_lo = vec![0u32; sigma as usize];
        let mut node_hi = vec![sigma; sigma as usize];
        let mut cur: Vec<u32> = seq.to_vec();
        let mut next = vec![0u32; seq.len()];
        let mut levels = Vec::with_capacity(depth);

        for _ in 0..depth {
            let goes_right: Vec<bool> = (0..sigma as usize)
                .map(|c| {
                    let (lo, hi) = (node_lo[c], node_hi[c]);
                    hi - lo > 1 && c as u32 >= split(lo, hi)
                })
                .collect();
            let mut raw = crate::bits::RawBits::with_capacity(cur.len());
            for &s in &cur {
                raw.push(goes_right[s as usize]);
            }
            levels.push(B::from_raw(&raw));

            for c in 0..sigma as usize {
                let (lo, hi) = (node_lo[c], node_hi[c]);
                if hi - lo > 1 {
                    let mid = split(lo, hi);
                    if goes_right[c] {
                        node_lo[c] = mid;
                    } else {
                        node_hi[c] = mid;
                    }
                }
            }
            // stable counting sort by the child node's lower bound
            let mut fill: Vec<usize> = (0..sigma as usize).map(|c| offsets.get(c)).collect();
            for &s in &cur {
                let slot = &mut fill[node_lo[s as usize] as usize];
                next[*slot] = s;
                *slot += 1;
            }
            std::mem::swap(&mut cur, &mut next);
        }

        let mut tree = Self {
            n: seq.len(),
            sigma,
            levels,
            offsets,
            node_ones: Vec::new(),
        };
        tree.fill_node_ones();
        Ok(tree)
    }

    fn fill_node_ones(&mut self) {
        if self.sigma > DENSE_OFFSETS_MAX_SIGMA {
            return;
        }
        let sigma = self.sigma as usize;
        let mut node_ones = vec![0u64; self.levels.len() * sigma];
        for (d, level) in self.levels.iter().enumerate() {
            for lo in 0..sigma {
                node_ones[d * sigma + lo] = level.rank1(self.offsets.get(lo)) as u64;
            }
        }
        self.node_ones = node_ones;
    }

    #[inline]
    fn ones_at_node(&self, d: usize, lo: u32, start: usize) -> usize {
        if self.node_ones.is_empty() {
            self.levels[d].rank1(start)
        } else {
            self.node_ones[d * self.sigma as usize + lo as usize] as usize
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[B] {
        &self.levels
    }

    pub fn leaf_offsets(&self) -> &LeafOffsets {
        &self.offsets
    }

    /// Number of elements with a symbol below `c` (`c <= sigma`).
    #[inline]
    pub fn leaf_offset(&self, c: u32) -> usize {
        self.offsets.get(c as usize)
    }

    /// Symbol at 1-based position `i`.
    pub fn access(&self, i: usize) -> Result<u32> {
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange {
                pos: i as u64,
                lo: 1,
                hi: self.n as u64,
            });
        }
        Ok(self.access_unchecked(i))
    }

    #[inline]
    pub(crate) fn access_unchecked(&self, i: usize) -> u32 {
        let mut p = i - 1;
        let (mut lo, mut hi) = (0u32, self.sigma);
        for (d, level) in self.levels.iter().enumerate() {
            if hi - lo == 1 {
                break;
            }
            let start = self.offsets.get(lo as usize);
            let start_ones = self.ones_at_node(d, lo, start);
            let mid = split(lo, hi);
            let ones = level.rank1(p);
            if level.get(p) {
                p = self.offsets.get(mid as usize) + (ones - start_ones);
                lo = mid;
            } else {
                p = start + ((p - ones) - (start - start_ones));
                hi = mid;
            }
        }
        lo
    }

    /// Occurrences of `c` among positions `1..=i`.
    pub fn rank(&self, c: u32, i: usize) -> Result<usize> {
        self.check_symbol(c)?;
        check_range(i, 0, self.n)?;
        Ok(self.leaf_position_unchecked(c, i) - self.leaf_offset(c))
    }

    /// Occurrences of `c` among positions `l..=r`; empty when `l = r + 1`.
    pub fn count_range(&self, c: u32, l: usize, r: usize) -> Result<usize> {
        self.check_symbol(c)?;
        if l == 0 || l > r + 1 || r > self.n {
            return Err(Error::OutOfRange {
                pos: if l == 0 { 0 } else { r as u64 },
                lo: l.max(1) as u64 - 1,
                hi: self.n as u64,
            });
        }
        Ok(self.leaf_position_unchecked(c, r) - self.leaf_position_unchecked(c, l - 1))
    }

    /// Leaf-order position reached by the prefix `1..=i` restricted to `c`:
    /// `leaf_offset(c) + rank(c, i)`.
    pub fn leaf_position(&self, c: u32, i: usize) -> Result<usize> {
        self.check_symbol(c)?;
        check_range(i, 0, self.n)?;
        Ok(self.leaf_position_unchecked(c, i))
    }

    #[inline]
    pub(crate) fn leaf_position_unchecked(&self, c: u32, i: usize) -> usize {
        let mut p = i;
        let (mut lo, mut hi) = (0u32, self.sigma);
        for (d, level) in self.levels.iter().enumerate() {
            if hi - lo == 1 {
                break;
            }
            let start = self.offsets.get(lo as usize);
            let start_ones = self.ones_at_node(d, lo, start);
            let mid = split(lo, hi);
            let ones = level.rank1(p);
            if c >= mid {
                p = self.offsets.get(mid as usize) + (ones - start_ones);
                lo = mid;
            } else {
                p = start + ((p - ones) - (start - start_ones));
                hi = mid;
            }
        }
        p
    }

    fn check_symbol(&self, c: u32) -> Result<()> {
        if c >= self.sigma {
            Err(Error::UnknownSymbol {
                symbol: c as u64,
                sigma: self.sigma as u64,
            })
        } else {
            Ok(())
        }
    }

    /// Serialized size of the level bitvectors alone.
    pub fn levels_size_bytes(&self) -> usize {
        self.levels.iter().map(|l| l.size_bytes()).sum()
    }
}

impl<B: BitBackend> Persist for WaveletTree<B> {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u64(out, self.sigma as u64);
        put_u64(out, self.n as u64);
        put_u8(out, B::TAG);
        self.offsets.write_to(out);
        for level in &self.levels {
            level.write_to(out);
        }
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let sigma = r.u64()?;
        if sigma == 0 || sigma > u32::MAX as u64 {
            return Err(Error::Format(format!("wavelet tree sigma {sigma}")));
        }
        let sigma = sigma as u32;
        let n = r.len_at_most(u64::MAX >> 8)?;
        r.expect_tag(B::TAG, B::NAME)?;
        let offsets = LeafOffsets::read_from(r)?;
        if offsets.len() != sigma as usize + 1 || offsets.get(sigma as usize) != n {
            return Err(Error::Format("leaf offsets disagree with tree shape".into()));
        }
        let depth = depth_for(sigma);
        let mut levels = Vec::with_capacity(depth);
        for _ in 0..depth {
            let level = B::read_from(r)?;
            if level.len() != n {
                return Err(Error::Format("wavelet level length differs from n".into()));
            }
            levels.push(level);
        }
        let mut tree = Self {
            n,
            sigma,
            levels,
            offsets,
            node_ones: Vec::new(),
        };
        tree.fill_node_ones();
        Ok(tree)
    }
}
