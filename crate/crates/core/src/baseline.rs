//! Run-length (activity, duration) arrays with day and block boundary bitmaps.
//!
//! Every (day, employee) block of the grid is cut into maximal runs. Runs
//! never cross a block boundary. Access locates the block's first run and
//! walks durations; counting walks every run in scope.

use crate::bits::{bit_width, IntArray, RankSelect, SparseBitVector};
use crate::chain::{read_config, write_config};
use crate::codec::{put_u64, Persist, Reader};
use crate::error::{Error, Result};
use crate::event::{EventGrid, GridConfig};
use crate::query::{check_days, Query};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineSeq {
    config: GridConfig,
    acts: IntArray,
    /// Run length minus one.
    durs: IntArray,
    /// Over run indices: first run of each day.
    day_starts: SparseBitVector,
    /// Over run indices: first run of each (day, employee) block.
    block_starts: SparseBitVector,
}

impl BaselineSeq {
    pub fn build(grid: &EventGrid) -> Result<Self> {
        let config = *grid.config();
        let act_w = bit_width(config.activities as u64);
        let dur_w = bit_width(config.resolution as u64 - 1).max(1);
        let mut acts = IntArray::new(act_w);
        let mut durs = IntArray::new(dur_w);
        let mut day_heads = Vec::with_capacity(config.days as usize);
        let mut block_heads = Vec::with_capacity(config.days as usize * config.employees as usize);
        for d in 1..=config.days {
            day_heads.push(acts.len() + 1);
            for e in 1..=config.employees {
                block_heads.push(acts.len() + 1);
                let block = grid.block(d, e);
                let mut i = 0;
                while i < block.len() {
                    let a = block[i];
                    let mut j = i + 1;
                    while j < block.len() && block[j] == a {
                        j += 1;
                    }
                    acts.push(a as u64);
                    durs.push((j - i - 1) as u64);
                    i = j;
                }
            }
        }
        let runs = acts.len();
        let bs = Self {
            config,
            acts,
            durs,
            day_starts: SparseBitVector::from_sorted_unchecked(runs, &day_heads),
            block_starts: SparseBitVector::from_sorted_unchecked(runs, &block_heads),
        };
        bs.verify()?;
        Ok(bs)
    }

    fn verify(&self) -> Result<()> {
        let c = &self.config;
        let runs = self.run_count();
        let fail = |m: String| Err(Error::Invariant(m));
        if self.durs.len() != runs || self.day_starts.len() != runs || self.block_starts.len() != runs {
            return fail("baseline arrays disagree on the run count".into());
        }
        if self.day_starts.rank1(runs) != c.days as usize {
            return fail("day bitmap does not mark every day".into());
        }
        if self.block_starts.rank1(runs) != c.days as usize * c.employees as usize {
            return fail("block bitmap does not mark every block".into());
        }
        let total: u64 = self.durs.iter().map(|d| d + 1).sum();
        if total != c.len() as u64 {
            return fail(format!("durations sum to {total}, grid has {} cells", c.len()));
        }
        for r in 1..runs {
            if !self.block_starts.get(r) && self.acts.get(r) == self.acts.get(r - 1) {
                return fail(format!("runs {r} and {} are equal neighbours", r + 1));
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn run_count(&self) -> usize {
        self.acts.len()
    }

    /// Activity and duration of run `r` (0-based).
    pub fn run(&self, r: usize) -> (u32, u32) {
        (self.acts.get(r) as u32, self.durs.get(r) as u32 + 1)
    }

    /// 0-based run range `[start, end)` of block `b` (0-based).
    fn block_runs(&self, b: usize) -> (usize, usize) {
        let start = self.block_starts.select1(b + 1).unwrap() - 1;
        let end = if b + 1 < self.block_starts.count_ones() {
            self.block_starts.select1(b + 2).unwrap() - 1
        } else {
            self.run_count()
        };
        (start, end)
    }

    /// 0-based run range covering days `d1..=d2`.
    fn day_runs(&self, d1: u32, d2: u32) -> (usize, usize) {
        let start = self.day_starts.select1(d1 as usize).unwrap() - 1;
        let end = if d2 < self.config.days {
            self.day_starts.select1(d2 as usize + 1).unwrap() - 1
        } else {
            self.run_count()
        };
        (start, end)
    }

    fn count_runs(&self, (start, end): (usize, usize), activity: u32) -> u64 {
        let a = activity as u64;
        (start..end)
            .filter(|&r| self.acts.get(r) == a)
            .map(|r| self.durs.get(r) + 1)
            .sum()
    }

    pub fn access(&self, day: u32, employee: u32, time: u32) -> Result<u32> {
        self.config.check_cell(day, employee, time)?;
        let b = (day as usize - 1) * self.config.employees as usize + employee as usize - 1;
        let (mut r, end) = self.block_runs(b);
        let mut covered = 0u64;
        while r < end {
            covered += self.durs.get(r) + 1;
            if covered >= time as u64 {
                return Ok(self.acts.get(r) as u32);
            }
            r += 1;
        }
        Err(Error::Invariant(format!("block {day}/{employee} shorter than {time}")))
    }

    /// Counting queries by traversal; Acc is rejected.
    pub fn count(&self, q: &Query) -> Result<u64> {
        let (d1, d2, emp, activity) = q
            .counting_scope()
            .ok_or_else(|| Error::Unsupported("baseline counting does not answer Acc".into()))?;
        check_days(&self.config, d1, d2)?;
        self.config.check_activity(activity)?;
        match emp {
            None => Ok(self.count_runs(self.day_runs(d1, d2), activity)),
            Some(e) => {
                self.config.check_employee(e)?;
                let ne = self.config.employees as usize;
                Ok((d1..=d2)
                    .map(|d| self.count_runs(self.block_runs((d as usize - 1) * ne + e as usize - 1), activity))
                    .sum())
            }
        }
    }

    /// Any query: Acc by positioning, counting kinds by traversal.
    pub fn answer(&self, q: &Query) -> Result<u64> {
        match *q {
            Query::Acc { day, employee, time } => self.access(day, employee, time).map(u64::from),
            _ => self.count(q),
        }
    }

    pub fn component_sizes(&self) -> Vec<(String, usize)> {
        vec![
            ("acts".into(), self.acts.size_bytes()),
            ("durs".into(), self.durs.size_bytes()),
            ("B_D".into(), self.day_starts.size_bytes()),
            ("B_E".into(), self.block_starts.size_bytes()),
        ]
    }
}

impl Persist for BaselineSeq {
    fn write_to(&self, out: &mut Vec<u8>) {
        write_config(out, &self.config);
        put_u64(out, self.run_count() as u64);
        self.acts.write_to(out);
        self.durs.write_to(out);
        self.day_starts.write_to(out);
        self.block_starts.write_to(out);
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        let config = read_config(r)?;
        let runs = r.len_at_most(config.len() as u64)?;
        let bs = Self {
            config,
            acts: IntArray::read_from(r)?,
            durs: IntArray::read_from(r)?,
            day_starts: SparseBitVector::read_from(r)?,
            block_starts: SparseBitVector::read_from(r)?,
        };
        if bs.run_count() != runs {
            return Err(Error::Format("baseline run count mismatch".into()));
        }
        bs.verify().map_err(|e| Error::Format(e.to_string()))?;
        Ok(bs)
    }
}
