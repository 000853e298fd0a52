//! Composition of reordering levels across grid dimensions.
//!
//! Level 1 indexes one label per grid cell in canonical order. Every later
//! level indexes the next dimension's labels in the previous level's leaf
//! order, i.e. after stably sorting the cells by every earlier level's label.
//! A range of level `k` restricted to label `c` maps to a contiguous range of
//! level `k + 1` through [`IndexLevel::leaf_position`].

use std::fmt;

use crate::codec::{put_u64, put_u8, Persist, Reader};
use crate::error::{Error, Result};
use crate::event::{EventGrid, GridConfig, ABSENT};
use crate::level::IndexLevel;
use crate::query::{check_days, Query};

/// A grid dimension usable as a level label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Activity,
    Employee,
    Day,
    Time,
}

impl Dimension {
    fn tag(self) -> u8 {
        match self {
            Dimension::Activity => 0,
            Dimension::Employee => 1,
            Dimension::Day => 2,
            Dimension::Time => 3,
        }
    }

    fn from_tag(t: u8) -> Result<Self> {
        Ok(match t {
            0 => Dimension::Activity,
            1 => Dimension::Employee,
            2 => Dimension::Day,
            3 => Dimension::Time,
            _ => return Err(Error::Format(format!("unknown dimension tag {t}"))),
        })
    }

    /// Alphabet of this dimension's level labels. Activities keep their grid
    /// codes; the other dimensions are shifted to start at 0.
    pub fn sigma(self, c: &GridConfig) -> u32 {
        match self {
            Dimension::Activity => c.activity_sigma(),
            Dimension::Employee => c.employees,
            Dimension::Day => c.days,
            Dimension::Time => c.resolution,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Activity => "activity",
            Dimension::Employee => "employee",
            Dimension::Day => "day",
            Dimension::Time => "time",
        })
    }
}

/// Level order used by the query helpers.
pub const DEFAULT_DIMS: [Dimension; 2] = [Dimension::Activity, Dimension::Employee];

/// Options for [`IndexChain::build_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainOptions {
    pub dims: Vec<Dimension>,
    /// Optional relabeling of activities before indexing: `perm[code]` is the
    /// symbol stored for `code`. Must be a permutation of `0..=A` fixing 0.
    pub activity_perm: Option<Vec<u32>>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            dims: DEFAULT_DIMS.to_vec(),
            activity_perm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Relabel {
    fwd: Vec<u32>,
    inv: Vec<u32>,
}

impl Relabel {
    fn new(perm: Vec<u32>, sigma: u32) -> Result<Self> {
        if perm.len() != sigma as usize || perm.first() != Some(&ABSENT) {
            return Err(Error::InvalidSpec(format!(
                "activity permutation must have {sigma} entries and map 0 to 0"
            )));
        }
        let mut inv = vec![u32::MAX; perm.len()];
        for (code, &sym) in perm.iter().enumerate() {
            if sym >= sigma || inv[sym as usize] != u32::MAX {
                return Err(Error::InvalidSpec("activity permutation is not a bijection".into()));
            }
            inv[sym as usize] = code as u32;
        }
        Ok(Self { fwd: perm, inv })
    }
}

/// Queryable composition of index levels over one grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexChain<L> {
    config: GridConfig,
    dims: Vec<Dimension>,
    levels: Vec<L>,
    relabel: Option<Relabel>,
}

impl<L: IndexLevel> IndexChain<L> {
    /// Activity level followed by employee level.
    pub fn build(grid: &EventGrid) -> Result<Self> {
        Self::build_with(grid, &ChainOptions::default())
    }

    pub fn build_with(grid: &EventGrid, opts: &ChainOptions) -> Result<Self> {
        let config = *grid.config();
        if opts.dims.is_empty() {
            return Err(Error::InvalidSpec("a chain needs at least one dimension".into()));
        }
        for (i, d) in opts.dims.iter().enumerate() {
            if opts.dims[..i].contains(d) {
                return Err(Error::InvalidSpec(format!("dimension {d} repeated in chain")));
            }
        }
        let relabel = opts
            .activity_perm
            .clone()
            .map(|p| Relabel::new(p, config.activity_sigma()))
            .transpose()?;
        let n = config.len();
        if opts.dims.len() > 1 && n > u32::MAX as usize {
            return Err(Error::Unsupported(format!(
                "multi-level chains over more than 2^32 cells ({n})"
            )));
        }

        let acts = grid.activities();
        let label = |dim: Dimension, idx: usize| -> u32 {
            match dim {
                Dimension::Activity => match &relabel {
                    Some(r) => r.fwd[acts[idx] as usize],
                    None => acts[idx],
                },
                Dimension::Employee => ((idx / config.block_len()) % config.employees as usize) as u32,
                Dimension::Day => (idx / config.day_len()) as u32,
                Dimension::Time => (idx % config.block_len()) as u32,
            }
        };

        // canonical cell index of each position of the current level's input
        let mut order: Vec<u32> = Vec::new();
        let mut levels = Vec::with_capacity(opts.dims.len());
        for (k, &dim) in opts.dims.iter().enumerate() {
            let sigma = dim.sigma(&config);
            let labels: Vec<u32> = if k == 0 {
                (0..n).map(|i| label(dim, i)).collect()
            } else {
                order.iter().map(|&i| label(dim, i as usize)).collect()
            };
            let level = L::build(&labels, sigma)?;
            if level.len() != n {
                return Err(Error::Invariant(format!("level {} has length {}", k + 1, level.len())));
            }
            if k + 1 < opts.dims.len() {
                let prev = if k == 0 { None } else { Some(std::mem::take(&mut order)) };
                let mut next = vec![0u32; n];
                let mut fill: Vec<usize> = (0..sigma).map(|c| level.leaf_offset(c)).collect();
                for (p, &c) in labels.iter().enumerate() {
                    let cell = prev.as_ref().map_or(p as u32, |o| o[p]);
                    next[fill[c as usize]] = cell;
                    fill[c as usize] += 1;
                }
                order = next;
            }
            levels.push(level);
        }
        Ok(Self {
            config,
            dims: opts.dims.clone(),
            levels,
            relabel,
        })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn levels(&self) -> &[L] {
        &self.levels
    }

    fn require_dims(&self, want: &[Dimension]) -> Result<()> {
        if self.dims.len() < want.len() || &self.dims[..want.len()] != want {
            return Err(Error::Unsupported(format!(
                "query needs a chain starting with {want:?}, this one is {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    #[inline]
    fn symbol(&self, activity: u32) -> u32 {
        match &self.relabel {
            Some(r) => r.fwd[activity as usize],
            None => activity,
        }
    }

    /// Activity recorded at a cell; 0 if absent.
    pub fn query_acc(&self, day: u32, employee: u32, time: u32) -> Result<u32> {
        self.require_dims(&[Dimension::Activity])?;
        let p = self.config.position_of(day, employee, time)?;
        let s = self.levels[0].expanded_access(p)?;
        Ok(match &self.relabel {
            Some(r) => r.inv[s as usize],
            None => s,
        })
    }

    /// Cells with `activity` over days `d1..=d2`, all employees.
    pub fn count_act_days(&self, activity: u32, d1: u32, d2: u32) -> Result<u64> {
        self.require_dims(&[Dimension::Activity])?;
        self.config.check_activity(activity)?;
        check_days(&self.config, d1, d2)?;
        let l1 = &self.levels[0];
        let c = self.symbol(activity);
        let hi = l1.expanded_rank(c, self.config.day_prefix_end(d2)?)?;
        let lo = l1.expanded_rank(c, self.config.day_prefix_end(d1 - 1)?)?;
        Ok((hi - lo) as u64)
    }

    /// Cells of one employee with `activity` over days `d1..=d2`, answered by
    /// mapping the day range through level 1 into level 2.
    pub fn count_act_emp_days(&self, activity: u32, employee: u32, d1: u32, d2: u32) -> Result<u64> {
        self.require_dims(&DEFAULT_DIMS)?;
        self.config.check_activity(activity)?;
        self.config.check_employee(employee)?;
        check_days(&self.config, d1, d2)?;
        let (l1, l2) = (&self.levels[0], &self.levels[1]);
        let c = self.symbol(activity);
        let lo = l1.leaf_position(c, self.config.day_prefix_end(d1 - 1)?)?;
        let hi = l1.leaf_position(c, self.config.day_prefix_end(d2)?)?;
        let e = employee - 1;
        Ok((l2.expanded_rank(e, hi)? - l2.expanded_rank(e, lo)?) as u64)
    }

    /// Same as `count_act_emp_days(activity, employee, day, day)`, read off
    /// the contiguous (day, employee) block of level 1.
    pub fn count_act_emp_one_day_direct(&self, activity: u32, employee: u32, day: u32) -> Result<u64> {
        self.require_dims(&[Dimension::Activity])?;
        self.config.check_activity(activity)?;
        let start = self.config.position_of(day, employee, 1)?;
        let end = start + self.config.block_len() - 1;
        let l1 = &self.levels[0];
        let c = self.symbol(activity);
        Ok((l1.expanded_rank(c, end)? - l1.expanded_rank(c, start - 1)?) as u64)
    }

    /// Answers any query; Acc returns the activity code.
    pub fn answer(&self, q: &Query) -> Result<u64> {
        match *q {
            Query::Acc { day, employee, time } => self.query_acc(day, employee, time).map(u64::from),
            Query::C1D1E1A { day, employee, activity } => {
                self.count_act_emp_one_day_direct(activity, employee, day)
            }
            Query::C1DaE1A { day, activity } => self.count_act_days(activity, day, day),
            Query::CrD1E1A { d1, d2, employee, activity } => {
                self.count_act_emp_days(activity, employee, d1, d2)
            }
            Query::CrDaE1A { d1, d2, activity } => self.count_act_days(activity, d1, d2),
        }
    }

    /// Serialized bytes per component, prefixed by level (`L1.tree`, ...).
    pub fn component_sizes(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        for (k, l) in self.levels.iter().enumerate() {
            for (name, bytes) in l.component_sizes() {
                out.push((format!("L{}.{name}", k + 1), bytes));
            }
        }
        out
    }
}

impl<L: IndexLevel> Persist for IndexChain<L> {
    fn write_to(&self, out: &mut Vec<u8>) {
        put_u8(out, L::VARIANT.tag());
        write_config(out, &self.config);
        put_u8(out, self.dims.len() as u8);
        for d in &self.dims {
            put_u8(out, d.tag());
        }
        match &self.relabel {
            None => put_u8(out, 0),
            Some(r) => {
                put_u8(out, 1);
                for &s in &r.fwd {
                    put_u64(out, s as u64);
                }
            }
        }
        for l in &self.levels {
            l.write_to(out);
        }
    }

    fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(L::VARIANT.tag(), L::VARIANT.name())?;
        let config = read_config(r)?;
        let k = r.u8()? as usize;
        if k == 0 || k > 4 {
            return Err(Error::Format(format!("chain of {k} levels")));
        }
        let dims = (0..k)
            .map(|_| Dimension::from_tag(r.u8()?))
            .collect::<Result<Vec<_>>>()?;
        let relabel = match r.u8()? {
            0 => None,
            1 => {
                let perm = (0..config.activity_sigma())
                    .map(|_| Ok(r.u64()? as u32))
                    .collect::<Result<Vec<_>>>()?;
                Some(Relabel::new(perm, config.activity_sigma()).map_err(|e| Error::Format(e.to_string()))?)
            }
            t => return Err(Error::Format(format!("bad relabel flag {t}"))),
        };
        let mut levels = Vec::with_capacity(k);
        for d in &dims {
            let l = L::read_from(r)?;
            if l.len() != config.len() || l.sigma() != d.sigma(&config) {
                return Err(Error::Format(format!(
                    "{d} level of length {} and sigma {} does not fit the grid",
                    l.len(),
                    l.sigma()
                )));
            }
            levels.push(l);
        }
        Ok(Self {
            config,
            dims,
            levels,
            relabel,
        })
    }
}

pub(crate) fn write_config(out: &mut Vec<u8>, c: &GridConfig) {
    for v in [c.days, c.employees, c.resolution, c.activities] {
        put_u64(out, v as u64);
    }
}

pub(crate) fn read_config(r: &mut Reader<'_>) -> Result<GridConfig> {
    let mut v = [0u32; 4];
    for slot in &mut v {
        *slot = u32::try_from(r.u64()?).map_err(|_| Error::Format("grid dimension overflow".into()))?;
    }
    GridConfig::new(v[0], v[1], v[2], v[3]).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventTuple;
    use crate::wtmap::WtMapLevel;
    use crate::wtrle::WtRleLevel;

    const A: u32 = 1;
    const B: u32 = 2;
    const C: u32 = 3;
    const E: u32 = 5;

    // rows of the small worked example; times follow row order per block
    pub(crate) fn worked_grid() -> EventGrid {
        let rows = [(1, 1, C), (1, 1, E), (1, 1, A), (1, 2, E), (1, 2, B), (2, 1, A), (2, 1, C), (2, 2, E), (3, 2, E)];
        let mut next = std::collections::HashMap::new();
        let tuples: Vec<EventTuple> = rows
            .iter()
            .map(|&(d, e, a)| {
                let t = next.entry((d, e)).or_insert(0);
                *t += 1;
                EventTuple::new(d, e, *t, a)
            })
            .collect();
        EventGrid::expand(&tuples, GridConfig::new(3, 2, 3, 5).unwrap()).unwrap()
    }

    fn check_worked_examples<L: IndexLevel + PartialEq + std::fmt::Debug>() {
        let ch = IndexChain::<L>::build(&worked_grid()).unwrap();
        assert_eq!(ch.count_act_days(E, 1, 3), Ok(4));
        assert_eq!(ch.count_act_days(E, 1, 2), Ok(3));
        assert_eq!(ch.count_act_days(E, 2, 3), Ok(2));
        assert_eq!(ch.count_act_emp_days(E, 2, 1, 2), Ok(2));
        assert_eq!(ch.count_act_emp_days(A, 1, 1, 3), Ok(2));
        assert_eq!(ch.query_acc(1, 2, 1), Ok(E));
        assert_eq!(ch.query_acc(3, 1, 1), Ok(0));
        assert_eq!(ch.count_act_emp_one_day_direct(0, 1, 3), Ok(3));
        assert_eq!(ch.count_act_emp_one_day_direct(E, 1, 3), Ok(0));
        for a in 0..=5 {
            for e in 1..=2 {
                for d in 1..=3 {
                    assert_eq!(
                        ch.count_act_emp_one_day_direct(a, e, d),
                        ch.count_act_emp_days(a, e, d, d)
                    );
                }
            }
        }
        assert!(matches!(ch.count_act_days(E, 2, 1), Err(Error::OutOfRange { .. })));
        assert!(ch.count_act_days(6, 1, 1).is_err());
        assert!(ch.query_acc(4, 1, 1).is_err());
        assert_eq!(IndexChain::<L>::from_bytes(&ch.to_bytes()).unwrap(), ch);
    }

    #[test]
    fn worked_examples_wtrle() {
        check_worked_examples::<WtRleLevel>();
    }

    #[test]
    fn worked_examples_wtmap() {
        check_worked_examples::<WtMapLevel>();
    }

    #[test]
    fn employee_level_follows_activity_leaf_order() {
        let ch = IndexChain::<WtRleLevel>::build(&worked_grid()).unwrap();
        let l2: Vec<u32> = (1..=18).map(|p| ch.levels()[1].expanded_access(p).unwrap() + 1).collect();
        // cells stably sorted by activity: nine absent cells, then A, A, B, C, C, E, E, E, E
        let absent = [2, 1, 2, 2, 1, 1, 1, 2, 2];
        let present = [1, 1, 2, 1, 1, 1, 2, 2, 2];
        assert_eq!(&l2[..9], &absent);
        assert_eq!(&l2[9..], &present);
    }

    #[test]
    fn degenerate_grids() {
        let c = GridConfig::new(2, 2, 4, 3).unwrap();
        let g = EventGrid::expand(&[], c).unwrap();
        let ch = IndexChain::<WtMapLevel>::build(&g).unwrap();
        assert_eq!(ch.levels()[0].expanded_rank(0, 16), Ok(16));
        for a in 1..=3 {
            assert_eq!(ch.count_act_days(a, 1, 2), Ok(0));
            assert_eq!(ch.count_act_emp_days(a, 2, 1, 2), Ok(0));
        }
        let one = EventGrid::expand(&[EventTuple::new(1, 1, 1, 1)], GridConfig::new(1, 1, 1, 1).unwrap()).unwrap();
        let ch = IndexChain::<WtRleLevel>::build(&one).unwrap();
        assert!(ch.levels().iter().all(|l| l.len() == 1));
        assert_eq!(ch.query_acc(1, 1, 1), Ok(1));
    }

    #[test]
    fn relabeled_chain_answers_in_original_codes() {
        let opts = ChainOptions {
            dims: DEFAULT_DIMS.to_vec(),
            activity_perm: Some(vec![0, 5, 4, 3, 2, 1]),
        };
        let g = worked_grid();
        let plain = IndexChain::<WtMapLevel>::build(&g).unwrap();
        let perm = IndexChain::<WtMapLevel>::build_with(&g, &opts).unwrap();
        for a in 0..=5 {
            assert_eq!(perm.count_act_days(a, 1, 3), plain.count_act_days(a, 1, 3));
            assert_eq!(perm.count_act_emp_days(a, 2, 1, 3), plain.count_act_emp_days(a, 2, 1, 3));
        }
        assert_eq!(perm.query_acc(1, 1, 1), Ok(C));
        assert_eq!(IndexChain::<WtMapLevel>::from_bytes(&perm.to_bytes()).unwrap(), perm);
        let bad = ChainOptions {
            activity_perm: Some(vec![1, 0, 2, 3, 4, 5]),
            ..ChainOptions::default()
        };
        assert!(IndexChain::<WtMapLevel>::build_with(&g, &bad).is_err());
    }

    #[test]
    fn other_chains() {
        let g = worked_grid();
        let opts = ChainOptions {
            dims: vec![Dimension::Employee, Dimension::Activity, Dimension::Day],
            activity_perm: None,
        };
        let ch = IndexChain::<WtRleLevel>::build_with(&g, &opts).unwrap();
        assert_eq!(ch.levels().len(), 3);
        // employee 2 block, then activity E inside it, then the days of those cells
        let l1 = &ch.levels()[0];
        let lo = l1.leaf_position(1, 0).unwrap();
        let hi = l1.leaf_position(1, 18).unwrap();
        assert_eq!(hi - lo, 9);
        let l2 = &ch.levels()[1];
        let (lo2, hi2) = (l2.leaf_position(E, lo).unwrap(), l2.leaf_position(E, hi).unwrap());
        assert_eq!(hi2 - lo2, 3);
        let days: Vec<u32> = (lo2 + 1..=hi2)
            .map(|p| ch.levels()[2].expanded_access(p).unwrap() + 1)
            .collect();
        assert_eq!(days, vec![1, 2, 3]);
        assert!(matches!(ch.query_acc(1, 1, 1), Err(Error::Unsupported(_))));
        let dup = ChainOptions {
            dims: vec![Dimension::Day, Dimension::Day],
            activity_perm: None,
        };
        assert!(IndexChain::<WtRleLevel>::build_with(&g, &dup).is_err());
    }
}
