//! Reordering level backed by a run-length compressed wavelet tree.

use crate::codec::{put_u64, Persist, Reader};
use crate::error::{check_range, Error, Result};
use crate::level::{check_symbol, IndexLevel, Variant};
use crate::wavelet::{LeafOffsets, RleWaveletTree};

/// Runs in the label sequence become runs in every tree level, and each
/// level is stored as an [`RleBitVector`](crate::bits::RleBitVector). The
/// tree's cumulative symbol counts double as the leaf offsets that compose
/// this level with the next one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WtRleLevel {
    tree: RleWaveletTree,
}

impl WtRleLevel {
    pub fn tree(&self) -> &RleWaveletTree {
        &self.tree
    }

    pub fn leaf_offsets(&self) -> &LeafOffsets {
        self.tree.leaf_offsets()
    }
}

impl IndexLevel for WtRleLevel {
    const VARIANT: Variant = Variant::Wtrle;

    fn build(labels: &[u32], sigma: u32) -> Result<Self> {
        let tree = RleWaveletTree::build(labels, sigma)?;
        let offs = tree.leaf_offsets();
        if offs.get(0) != 0 || offs.get(sigma as usize) != labels.len() {
            return Err(Error::Invariant("leaf offsets do not span the sequence".into()));
        }
        Ok(Self { tree })
    }

    fn len(&self) -> usize {
        self.tree.len()
    }

    fn sigma(&self) -> u32 {
        self.tree.sigma()
    }

    fn expanded_access(&self, p: usize) -> Result<u32> {
        self.tree.access(p)
    }

    #[inline]
    fn expanded_rank(&self, c: u32, p: usize) -> Result<usize> {
        self.tree.rank(c, p)
    }

    #[inline]
    fn leaf_offset(&self, c: u32) -> usize {
        self.tree.leaf_offset(c)
    }

    #[inline]
    fn leaf_position(&self, c: u32, p: usize) -> Result<usize> {
        check_symbol(c, self.sigma())?;
        check_range(p, 0, self.len())?;
        Ok(self.tree.leaf_position_unchecked(c, p))
    }

    fn component_sizes(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("tree", self.tree.levels_size_bytes()),
            ("offsets", self.tree.leaf_offsets().size_bytes()),
        ]
    }
}

impl Persist for WtRleLevel {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u64(out, self.sigma() as u64);
        self.tree.write_to(out);
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let sigma = r.u64()?;
        let tree = RleWaveletTree::read_from(r)?;
        if tree.sigma() as u64 != sigma {
            return Err(Error::Format("wtrle level sigma mismatch".into()));
        }
        Ok(Self { tree })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // worked-example activity column with A=0 .. E=4
    const ACTS: [u32; 9] = [2, 4, 0, 4, 1, 0, 2, 4, 4];

    #[test]
    fn worked_offsets_and_positions() {
        let l = WtRleLevel::build(&ACTS, 5).unwrap();
        let offs: Vec<usize> = (0..=5).map(|c| l.leaf_offset(c)).collect();
        assert_eq!(offs, vec![0, 2, 3, 5, 5, 9]);
        assert_eq!(l.expanded_rank(4, 9), Ok(4));
        assert_eq!(l.expanded_rank(2, 7), Ok(2));
        assert_eq!(l.expanded_rank(3, 0), Ok(0));
        assert_eq!(l.expanded_access(5), Ok(1));
        assert_eq!(l.leaf_position(4, 9), Ok(9));
        assert_eq!(l.leaf_position(0, 0), Ok(0));
        assert_eq!(l.leaf_position(2, 9), Ok(5));
    }

    #[test]
    fn constant_sequence_is_tiny() {
        let labels = vec![3u32; 10_000];
        let l = WtRleLevel::build(&labels, 5).unwrap();
        assert_eq!(l.expanded_access(1), Ok(3));
        assert_eq!(l.expanded_rank(3, 10_000), Ok(10_000));
        // 10^4 symbols over 3 levels would need ~3.75 KB uncompressed
        assert!(l.size_bytes() < 600, "size {}", l.size_bytes());
    }

    #[test]
    fn empty_labels() {
        let l = WtRleLevel::build(&[], 5).unwrap();
        assert!((0..=5).all(|c| l.leaf_offset(c) == 0));
        assert_eq!(l.expanded_rank(1, 0), Ok(0));
        assert!(l.expanded_access(1).is_err());
    }

    #[test]
    fn bytes_round_trip() {
        let l = WtRleLevel::build(&ACTS, 5).unwrap();
        assert_eq!(WtRleLevel::from_bytes(&l.to_bytes()).unwrap(), l);
    }
}
