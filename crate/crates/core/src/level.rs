use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::Persist;
use crate::error::{Error, Result};

/// Physical representation of an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Wtrle,
    Wtmap,
    Baseline,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Wtrle, Variant::Wtmap, Variant::Baseline];

    pub fn tag(self) -> u8 {
        match self {
            Variant::Wtrle => 1,
            Variant::Wtmap => 2,
            Variant::Baseline => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag() == tag)
            .ok_or_else(|| Error::Format(format!("unknown variant tag {tag}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Wtrle => "wtrle",
            Variant::Wtmap => "wtmap",
            Variant::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("variant {s:?} (expected wtrle, wtmap or baseline)")))
    }
}

/// One reordering level of a composed index: a sequence of labels in the
/// level's input order, queried in "expanded" coordinates `1..=len`, that
/// also knows where each label's group starts in its stably sorted (leaf)
/// order.
pub trait IndexLevel: Persist + Send + Sync + Sized {
    const VARIANT: Variant;

    fn build(labels: &[u32], sigma: u32) -> Result<Self>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sigma(&self) -> u32;

    /// Label at position `p` in `1..=len`.
    fn expanded_access(&self, p: usize) -> Result<u32>;

    /// Occurrences of `c` among positions `1..=p`.
    fn expanded_rank(&self, c: u32, p: usize) -> Result<usize>;

    /// Elements whose label is below `c`, for `c` in `0..=sigma`.
    fn leaf_offset(&self, c: u32) -> usize;

    /// `leaf_offset(c) + expanded_rank(c, p)`: where the prefix `1..=p`,
    /// restricted to `c`, ends in leaf order. This maps a range of this
    /// level's input onto the input of the next level.
    fn leaf_position(&self, c: u32, p: usize) -> Result<usize>;

    /// Serialized bytes per named component.
    fn component_sizes(&self) -> Vec<(&'static str, usize)>;
}

pub(crate) fn check_symbol(c: u32, sigma: u32) -> Result<()> {
    if c >= sigma {
        Err(Error::UnknownSymbol {
            symbol: c as u64,
            sigma: sigma as u64,
        })
    } else {
        Ok(())
    }
}
