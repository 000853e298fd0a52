//! Brute-force reference answers for tests: linear scans over the raw grid
//! and literal definitions of access, rank and select.

use evseq::event::{parse_tuples, EventGrid};
use evseq::query::Query;
use evseq::{Error, Result};

/// Answers every query kind by scanning the expanded grid.
#[derive(Debug, Clone)]
pub struct NaiveGridOracle {
    grid: EventGrid,
}

impl NaiveGridOracle {
    pub fn new(grid: EventGrid) -> Self {
        Self { grid }
    }

    /// Parses a tuple file with the same reader the indexes use.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let f = parse_tuples(text)?;
        let config = f.infer_config()?;
        Ok(Self::new(EventGrid::expand(&f.tuples, config)?))
    }

    pub fn grid(&self) -> &EventGrid {
        &self.grid
    }

    pub fn answer(&self, q: &Query) -> Result<u64> {
        let c = self.grid.config();
        q.validate(c)?;
        if let Query::Acc { day, employee, time } = *q {
            return self.grid.get(day, employee, time).map(u64::from);
        }
        let (d1, d2, emp, activity) = q.counting_scope().unwrap();
        let emps = match emp {
            Some(e) => e..=e,
            None => 1..=c.employees,
        };
        let mut n = 0;
        for d in d1..=d2 {
            for e in emps.clone() {
                for t in 1..=c.resolution {
                    if self.grid.get(d, e, t)? == activity {
                        n += 1;
                    }
                }
            }
        }
        Ok(n)
    }
}

fn range_err(pos: usize, lo: usize, hi: usize) -> Error {
    Error::OutOfRange {
        pos: pos as u64,
        lo: lo as u64,
        hi: hi as u64,
    }
}

/// Bit at 1-based position `i`.
pub fn naive_access(bits: &[bool], i: usize) -> Result<bool> {
    if i == 0 || i > bits.len() {
        return Err(range_err(i, 1, bits.len()));
    }
    Ok(bits[i - 1])
}

/// Occurrences of `b` among positions `1..=i`.
pub fn naive_rank(bits: &[bool], b: bool, i: usize) -> Result<usize> {
    if i > bits.len() {
        return Err(range_err(i, 0, bits.len()));
    }
    Ok(bits[..i].iter().filter(|&&x| x == b).count())
}

/// Position of the `j`-th `b`.
pub fn naive_select(bits: &[bool], b: bool, j: usize) -> Result<usize> {
    if j == 0 {
        return Err(range_err(0, 1, bits.len()));
    }
    bits.iter()
        .enumerate()
        .filter(|(_, &x)| x == b)
        .nth(j - 1)
        .map(|(i, _)| i + 1)
        .ok_or_else(|| Error::NotFound {
            what: format!("{}-bit", u8::from(b)),
            ordinal: j as u64,
            total: bits.iter().filter(|&&x| x == b).count() as u64,
        })
}

/// Occurrences of symbol `c` among positions `1..=i`.
pub fn naive_symbol_rank(seq: &[u32], c: u32, i: usize) -> usize {
    seq[..i].iter().filter(|&&x| x == c).count()
}

/// Symbols below `c`.
pub fn naive_leaf_offset(seq: &[u32], c: u32) -> usize {
    seq.iter().filter(|&&x| x < c).count()
}

/// The stable sort of `seq` by symbol, as 0-based source indices.
pub fn naive_leaf_order(seq: &[u32]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..seq.len()).collect();
    idx.sort_by_key(|&i| seq[i]);
    idx
}

/// Maximal runs as `(symbol, length)`.
pub fn naive_runs(seq: &[u32]) -> Vec<(u32, usize)> {
    let mut out: Vec<(u32, usize)> = Vec::new();
    for &s in seq {
        match out.last_mut() {
            Some((p, n)) if *p == s => *n += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|b| b == b'1').collect()
    }

    #[test]
    fn definitional_values() {
        let v = bits("101100");
        assert_eq!(naive_access(&v, 3), Ok(true));
        assert_eq!(naive_access(&v, 2), Ok(false));
        assert_eq!(naive_rank(&v, true, 4), Ok(3));
        assert_eq!(naive_rank(&v, false, 6), Ok(3));
        assert_eq!(naive_rank(&v, true, 0), Ok(0));
        assert_eq!(naive_select(&v, true, 2), Ok(3));
        assert_eq!(naive_select(&v, false, 1), Ok(2));
        assert!(matches!(naive_select(&v, true, 4), Err(Error::NotFound { .. })));
        assert!(matches!(naive_rank(&v, true, 7), Err(Error::OutOfRange { .. })));
        assert_eq!(naive_rank(&bits("111000011"), true, 7), Ok(3));
    }

    #[test]
    fn worked_grid() {
        let tsv = "# evseq-tuples days=3 employees=2 resolution=3 activities=5\n\
                   1\t1\t1\t3\n1\t1\t2\t5\n1\t1\t3\t1\n1\t2\t1\t5\n1\t2\t2\t2\n\
                   2\t1\t1\t1\n2\t1\t2\t3\n2\t2\t1\t5\n3\t2\t1\t5\n";
        let o = NaiveGridOracle::from_tsv(tsv).unwrap();
        assert_eq!(o.answer(&Query::CrDaE1A { d1: 1, d2: 3, activity: 5 }), Ok(4));
        assert_eq!(o.answer(&Query::CrDaE1A { d1: 1, d2: 2, activity: 5 }), Ok(3));
        assert_eq!(o.answer(&Query::CrD1E1A { d1: 1, d2: 2, employee: 2, activity: 5 }), Ok(2));
        assert_eq!(o.answer(&Query::CrD1E1A { d1: 1, d2: 3, employee: 1, activity: 1 }), Ok(2));
        assert_eq!(o.answer(&Query::Acc { day: 1, employee: 2, time: 1 }), Ok(5));
        assert!(o.answer(&Query::Acc { day: 4, employee: 1, time: 1 }).is_err());
    }

    #[test]
    fn sequence_helpers() {
        let s = [2, 4, 0, 4, 1, 0, 2, 4, 4];
        assert_eq!(naive_leaf_offset(&s, 2), 3);
        assert_eq!(naive_symbol_rank(&s, 4, 9), 4);
        assert_eq!(naive_leaf_order(&s)[..3], [2, 5, 4]);
        assert_eq!(naive_runs(&[1, 1, 2, 1]), vec![(1, 2), (2, 1), (1, 1)]);
    }
}
