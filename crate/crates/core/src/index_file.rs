//! On-disk index container.
//!
//! Layout: `"EVSQ1"`, format version (u16), variant tag (u8), payload length
//! (u64), payload, CRC-64/XZ of the payload (u64). The payload holds the grid
//! shape, the activity dictionary and the variant's structure.

use crc::{Crc, CRC_64_XZ};

use crate::baseline::BaselineSeq;
use crate::chain::{read_config, write_config, IndexChain};
use crate::codec::{put_bytes, put_u16, put_u64, put_u8, Persist, Reader};
use crate::error::{Error, Result};
use crate::event::{Dictionary, EventGrid, GridConfig};
use crate::level::Variant;
use crate::query::Query;
use crate::wtmap::WtMapLevel;
use crate::wtrle::WtRleLevel;

pub const MAGIC: &[u8; 5] = b"EVSQ1";
pub const FORMAT_VERSION: u16 = 1;

const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

/// Any of the three index representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyIndex {
    Wtrle(IndexChain<WtRleLevel>),
    Wtmap(IndexChain<WtMapLevel>),
    Baseline(BaselineSeq),
}

impl AnyIndex {
    pub fn build(grid: &EventGrid, variant: Variant) -> Result<Self> {
        Ok(match variant {
            Variant::Wtrle => AnyIndex::Wtrle(IndexChain::build(grid)?),
            Variant::Wtmap => AnyIndex::Wtmap(IndexChain::build(grid)?),
            Variant::Baseline => AnyIndex::Baseline(BaselineSeq::build(grid)?),
        })
    }

    pub fn variant(&self) -> Variant {
        match self {
            AnyIndex::Wtrle(_) => Variant::Wtrle,
            AnyIndex::Wtmap(_) => Variant::Wtmap,
            AnyIndex::Baseline(_) => Variant::Baseline,
        }
    }

    pub fn config(&self) -> &GridConfig {
        match self {
            AnyIndex::Wtrle(c) => c.config(),
            AnyIndex::Wtmap(c) => c.config(),
            AnyIndex::Baseline(b) => b.config(),
        }
    }

    #[inline]
    pub fn answer(&self, q: &Query) -> Result<u64> {
        match self {
            AnyIndex::Wtrle(c) => c.answer(q),
            AnyIndex::Wtmap(c) => c.answer(q),
            AnyIndex::Baseline(b) => b.answer(q),
        }
    }

    pub fn component_sizes(&self) -> Vec<(String, usize)> {
        match self {
            AnyIndex::Wtrle(c) => c.component_sizes(),
            AnyIndex::Wtmap(c) => c.component_sizes(),
            AnyIndex::Baseline(b) => b.component_sizes(),
        }
    }

    /// Serialized size of the structure alone.
    pub fn size_bytes(&self) -> usize {
        match self {
            AnyIndex::Wtrle(c) => c.size_bytes(),
            AnyIndex::Wtmap(c) => c.size_bytes(),
            AnyIndex::Baseline(b) => b.size_bytes(),
        }
    }

    fn write_body(&self, out: &mut Vec<u8>) {
        match self {
            AnyIndex::Wtrle(c) => c.write_to(out),
            AnyIndex::Wtmap(c) => c.write_to(out),
            AnyIndex::Baseline(b) => b.write_to(out),
        }
    }

    fn read_body(variant: Variant, r: &mut Reader<'_>) -> Result<Self> {
        Ok(match variant {
            Variant::Wtrle => AnyIndex::Wtrle(IndexChain::read_from(r)?),
            Variant::Wtmap => AnyIndex::Wtmap(IndexChain::read_from(r)?),
            Variant::Baseline => AnyIndex::Baseline(BaselineSeq::read_from(r)?),
        })
    }
}

/// A loaded or freshly built index together with its activity names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexFile {
    pub dictionary: Dictionary,
    pub index: AnyIndex,
}

impl IndexFile {
    pub fn build(grid: &EventGrid, variant: Variant, dictionary: Dictionary) -> Result<Self> {
        Ok(Self {
            dictionary,
            index: AnyIndex::build(grid, variant)?,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut payload = Vec::new();
        write_config(&mut payload, self.index.config());
        put_bytes(&mut payload, self.dictionary.to_text().as_bytes());
        self.index.write_body(&mut payload);

        let mut out = Vec::with_capacity(payload.len() + 32);
        out.extend_from_slice(MAGIC);
        put_u16(&mut out, FORMAT_VERSION);
        put_u8(&mut out, self.index.variant().tag());
        put_u64(&mut out, payload.len() as u64);
        out.extend_from_slice(&payload);
        put_u64(&mut out, CRC64.checksum(&payload));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::Format("not an evseq index file (bad magic)".into()));
        }
        let mut r = Reader::new(&bytes[MAGIC.len()..]);
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let variant = Variant::from_tag(r.u8()?)?;
        let len = r.len_at_most(r.remaining() as u64)?;
        let start = bytes.len() - r.remaining();
        let payload = &bytes[start..start + len];
        let mut tail = Reader::new(&bytes[start + len..]);
        let stored = tail.u64()?;
        if !tail.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes after checksum", tail.remaining())));
        }
        let actual = CRC64.checksum(payload);
        if stored != actual {
            return Err(Error::Format(format!(
                "checksum mismatch: stored {stored:016x}, computed {actual:016x}"
            )));
        }

        let mut p = Reader::new(payload);
        let config = read_config(&mut p)?;
        let dict_text = std::str::from_utf8(p.bytes()?)
            .map_err(|_| Error::Format("dictionary is not UTF-8".into()))?;
        let dictionary = Dictionary::parse(dict_text).map_err(|e| Error::Format(e.to_string()))?;
        let index = AnyIndex::read_body(variant, &mut p)?;
        if !p.is_empty() {
            return Err(Error::Format(format!("{} trailing payload bytes", p.remaining())));
        }
        if *index.config() != config {
            return Err(Error::Format("grid shape in header disagrees with the index".into()));
        }
        Ok(Self { dictionary, index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventTuple;

    fn grid() -> EventGrid {
        let c = GridConfig::new(2, 2, 4, 3).unwrap();
        let t = [EventTuple::new(1, 1, 1, 2), EventTuple::new(1, 1, 2, 2), EventTuple::new(2, 2, 4, 3)];
        EventGrid::expand(&t, c).unwrap()
    }

    #[test]
    fn round_trip_every_variant() {
        let dict = Dictionary::parse("1\twalk\n2\ttalk\n3\tsleep\n").unwrap();
        for v in Variant::ALL {
            let f = IndexFile::build(&grid(), v, dict.clone()).unwrap();
            let bytes = f.to_bytes();
            assert_eq!(&bytes[..5], b"EVSQ1");
            let back = IndexFile::from_bytes(&bytes).unwrap();
            assert_eq!(back, f);
            assert_eq!(back.index.answer(&Query::C1D1E1A { day: 1, employee: 1, activity: 2 }), Ok(2));
            assert_eq!(bytes, IndexFile::build(&grid(), v, dict.clone()).unwrap().to_bytes());
        }
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = IndexFile::build(&grid(), Variant::Wtmap, Dictionary::default()).unwrap().to_bytes();
        for i in [20, bytes.len() / 2, bytes.len() - 9] {
            let mut bad = bytes.clone();
            bad[i] ^= 0x10;
            let err = IndexFile::from_bytes(&bad).unwrap_err();
            assert!(err.to_string().contains("checksum"), "{err}");
        }
        assert!(IndexFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(IndexFile::from_bytes(b"EVSQ2").is_err());
    }
}
