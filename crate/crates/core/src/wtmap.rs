//! Reordering level that removes runs before building a plain wavelet tree.
//!
//! For a label sequence of length `n` with `n_runs` maximal runs:
//!
//! * `marks` (B_M, length `n`) has a one at the first position of each run;
//! * `tree` is a plain wavelet tree over the run heads S′ (one symbol per run);
//! * `run_lengths` (B_C, length `n`) lists the runs in leaf order, i.e. stably
//!   sorted by symbol, each as `len - 1` zeros followed by a one, so
//!   `select1(B_C, t)` is the total length of the first `t` leaf-order runs.
//!
//! The tree's cumulative counts are the per-symbol run offsets; the element
//! offsets (B_L) are derived as `select1(B_C, run_offset[c])`.

use crate::bits::{RankSelect, SparseBitVector};
use crate::codec::{put_u64, Persist, Reader};
use crate::error::{check_range, Error, Result};
use crate::level::{check_symbol, IndexLevel, Variant};
use crate::wavelet::PlainWaveletTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WtMapLevel {
    n: usize,
    marks: SparseBitVector,
    tree: PlainWaveletTree,
    run_lengths: SparseBitVector,
}

/// `select1` with the convention `select1(_, 0) = 0`.
#[inline]
fn select1_or_zero(bv: &SparseBitVector, j: usize) -> usize {
    if j == 0 {
        0
    } else {
        bv.select1(j).unwrap()
    }
}

impl WtMapLevel {
    pub fn run_count(&self) -> usize {
        self.tree.len()
    }

    /// B_M.
    pub fn marks(&self) -> &SparseBitVector {
        &self.marks
    }

    /// B_C.
    pub fn run_lengths(&self) -> &SparseBitVector {
        &self.run_lengths
    }

    pub fn tree(&self) -> &PlainWaveletTree {
        &self.tree
    }

    /// Runs with a symbol below `c`.
    pub fn run_offset(&self, c: u32) -> usize {
        self.tree.leaf_offset(c)
    }

    /// Checks the structural invariants; with `labels`, also checks that the
    /// derived leaf offsets equal the label frequency prefix sums.
    pub fn verify(&self, labels: Option<&[u32]>) -> Result<()> {
        let runs = self.run_count();
        let fail = |m: String| Err(Error::Invariant(m));
        if self.marks.len() != self.n || self.run_lengths.len() != self.n {
            return fail("bitmap lengths differ from n".into());
        }
        if self.marks.rank1(self.n) != runs {
            return fail(format!("rank1(B_M, n) = {} but {runs} runs", self.marks.rank1(self.n)));
        }
        if self.n > 0 && !self.marks.get(0) {
            return fail("B_M does not mark position 1".into());
        }
        if self.run_lengths.rank1(self.n) != runs {
            return fail(format!(
                "rank1(B_C, n) = {} but {runs} runs",
                self.run_lengths.rank1(self.n)
            ));
        }
        if select1_or_zero(&self.run_lengths, runs) != self.n {
            return fail("run lengths in B_C do not sum to n".into());
        }
        let mut prev = None;
        for r in 1..=runs {
            let s = self.tree.access_unchecked(r);
            if prev == Some(s) {
                return fail(format!("run heads {} and {r} carry the same symbol {s}", r - 1));
            }
            prev = Some(s);
        }
        if let Some(labels) = labels {
            if labels.len() != self.n {
                return fail("label count differs from n".into());
            }
            let mut freq = vec![0usize; self.tree.sigma() as usize + 1];
            for &l in labels {
                freq[l as usize + 1] += 1;
            }
            let mut acc = 0;
            for c in 0..=self.tree.sigma() {
                acc += freq[c as usize];
                if self.leaf_offset(c) != acc {
                    return fail(format!(
                        "derived leaf offset of {c} is {}, frequency prefix sum is {acc}",
                        self.leaf_offset(c)
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn leaf_position_unchecked(&self, c: u32, p: usize) -> usize {
        if p == 0 {
            return self.leaf_offset(c);
        }
        let r = self.marks.rank1(p);
        let start = self.marks.select1(r).unwrap();
        // leaf-order run index just past the runs of c completed before run r
        let full_end = self.tree.leaf_position_unchecked(c, r - 1);
        let complete = select1_or_zero(&self.run_lengths, full_end);
        if self.tree.access_unchecked(r) == c {
            complete + (p - start + 1)
        } else {
            complete
        }
    }
}

impl IndexLevel for WtMapLevel {
    const VARIANT: Variant = Variant::Wtmap;

    fn build(labels: &[u32], sigma: u32) -> Result<Self> {
        let n = labels.len();
        let mut heads = Vec::new();
        let mut head_syms = Vec::new();
        let mut lens = Vec::new();
        for (i, &s) in labels.iter().enumerate() {
            if s >= sigma {
                return Err(Error::UnknownSymbol {
                    symbol: s as u64,
                    sigma: sigma as u64,
                });
            }
            if i == 0 || labels[i - 1] != s {
                heads.push(i + 1);
                head_syms.push(s);
                lens.push(0usize);
            }
            *lens.last_mut().unwrap() += 1;
        }
        let marks = SparseBitVector::from_sorted_unchecked(n, &heads);
        let tree = PlainWaveletTree::build(&head_syms, sigma)?;

        // runs in leaf order: stable counting sort of run indices by symbol
        let mut fill: Vec<usize> = (0..sigma).map(|c| tree.leaf_offset(c)).collect();
        let mut leaf_lens = vec![0usize; lens.len()];
        for (&s, &len) in head_syms.iter().zip(&lens) {
            leaf_lens[fill[s as usize]] = len;
            fill[s as usize] += 1;
        }
        let mut ends = Vec::with_capacity(leaf_lens.len());
        let mut acc = 0;
        for len in leaf_lens {
            acc += len;
            ends.push(acc);
        }
        let run_lengths = SparseBitVector::from_sorted_unchecked(n, &ends);

        let level = Self {
            n,
            marks,
            tree,
            run_lengths,
        };
        level.verify(Some(labels))?;
        Ok(level)
    }

    fn len(&self) -> usize {
        self.n
    }

    fn sigma(&self) -> u32 {
        self.tree.sigma()
    }

    fn expanded_access(&self, p: usize) -> Result<u32> {
        if p == 0 || p > self.n {
            return Err(Error::OutOfRange {
                pos: p as u64,
                lo: 1,
                hi: self.n as u64,
            });
        }
        Ok(self.tree.access_unchecked(self.marks.rank1(p)))
    }

    fn expanded_rank(&self, c: u32, p: usize) -> Result<usize> {
        check_symbol(c, self.sigma())?;
        check_range(p, 0, self.n)?;
        Ok(self.leaf_position_unchecked(c, p) - self.leaf_offset(c))
    }

    #[inline]
    fn leaf_offset(&self, c: u32) -> usize {
        select1_or_zero(&self.run_lengths, self.tree.leaf_offset(c))
    }

    fn leaf_position(&self, c: u32, p: usize) -> Result<usize> {
        check_symbol(c, self.sigma())?;
        check_range(p, 0, self.n)?;
        Ok(self.leaf_position_unchecked(c, p))
    }

    fn component_sizes(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("B_M", self.marks.size_bytes()),
            ("tree", self.tree.levels_size_bytes()),
            ("B_C", self.run_lengths.size_bytes()),
            ("offsets", self.tree.leaf_offsets().size_bytes()),
        ]
    }
}

impl Persist for WtMapLevel {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u64(out, self.sigma() as u64);
        put_u64(out, self.n as u64);
        put_u64(out, self.run_count() as u64);
        self.marks.write_to(out);
        self.tree.write_to(out);
        self.run_lengths.write_to(out);
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let sigma = r.u64()?;
        let n = r.len_at_most(u64::MAX >> 8)?;
        let runs = r.len_at_most(n as u64)?;
        let marks = SparseBitVector::read_from(r)?;
        let tree = PlainWaveletTree::read_from(r)?;
        let run_lengths = SparseBitVector::read_from(r)?;
        if tree.sigma() as u64 != sigma || tree.len() != runs {
            return Err(Error::Format("wtmap header disagrees with its tree".into()));
        }
        let level = Self {
            n,
            marks,
            tree,
            run_lengths,
        };
        level
            .verify(None)
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(level)
    }
}
