//! Dense day × employee × time grid of activity codes.
//!
//! Cells are linearized day first, then employee, then time, so every
//! (day, employee) pair owns a contiguous block of `R` positions and every day
//! a block of `E·R`. Activity code 0 marks an absent cell.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Activity code for a cell with no recorded event.
pub const ABSENT: u32 = 0;

/// First token of the tuple-file header comment.
pub const TSV_HEADER_TAG: &str = "# evseq-tuples";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridConfig {
    pub days: u32,
    pub employees: u32,
    /// Time instants per day.
    pub resolution: u32,
    /// Real activities, coded `1..=activities`.
    pub activities: u32,
}

impl GridConfig {
    pub fn new(days: u32, employees: u32, resolution: u32, activities: u32) -> Result<Self> {
        let c = Self {
            days,
            employees,
            resolution,
            activities,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.days == 0 || self.employees == 0 || self.resolution == 0 || self.activities == 0 {
            return Err(Error::Ingestion(format!(
                "grid dimensions must all be at least 1: {self:?}"
            )));
        }
        if self.activities == u32::MAX {
            return Err(Error::Ingestion("too many activities".into()));
        }
        let n = self.days as u128 * self.employees as u128 * self.resolution as u128;
        if n >= 1u128 << 63 || n > usize::MAX as u128 {
            return Err(Error::Ingestion(format!("grid of {n} cells is too large")));
        }
        Ok(())
    }

    /// Total cells `D·E·R`.
    pub fn len(&self) -> usize {
        self.days as usize * self.employees as usize * self.resolution as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Alphabet size of the activity dimension, including the absent code.
    pub fn activity_sigma(&self) -> u32 {
        self.activities + 1
    }

    pub fn block_len(&self) -> usize {
        self.resolution as usize
    }

    pub fn day_len(&self) -> usize {
        self.employees as usize * self.resolution as usize
    }

    /// 1-based grid position of a cell.
    pub fn position_of(&self, day: u32, employee: u32, time: u32) -> Result<usize> {
        self.check_cell(day, employee, time)?;
        Ok(self.position_unchecked(day, employee, time))
    }

    #[inline]
    pub(crate) fn position_unchecked(&self, day: u32, employee: u32, time: u32) -> usize {
        ((day as usize - 1) * self.employees as usize + (employee as usize - 1))
            * self.resolution as usize
            + time as usize
    }

    /// Inverse of [`position_of`](Self::position_of).
    pub fn decode(&self, pos: usize) -> Result<(u32, u32, u32)> {
        crate::error::check_range(pos, 1, self.len())?;
        let z = pos - 1;
        let r = self.resolution as usize;
        let e = self.employees as usize;
        Ok((
            (z / (e * r)) as u32 + 1,
            ((z / r) % e) as u32 + 1,
            (z % r) as u32 + 1,
        ))
    }

    /// Last position of day `d` (`d·E·R`); 0 for `d = 0`.
    pub fn day_prefix_end(&self, d: u32) -> Result<usize> {
        if d > self.days {
            return Err(Error::OutOfRange {
                pos: d as u64,
                lo: 0,
                hi: self.days as u64,
            });
        }
        Ok(d as usize * self.day_len())
    }

    pub fn check_day(&self, day: u32) -> Result<()> {
        check_field(day, 1, self.days)
    }

    pub fn check_employee(&self, employee: u32) -> Result<()> {
        check_field(employee, 1, self.employees)
    }

    pub fn check_time(&self, time: u32) -> Result<()> {
        check_field(time, 1, self.resolution)
    }

    pub fn check_activity(&self, activity: u32) -> Result<()> {
        if activity > self.activities {
            Err(Error::UnknownSymbol {
                symbol: activity as u64,
                sigma: self.activity_sigma() as u64,
            })
        } else {
            Ok(())
        }
    }

    pub fn check_cell(&self, day: u32, employee: u32, time: u32) -> Result<()> {
        self.check_day(day)?;
        self.check_employee(employee)?;
        self.check_time(time)
    }

    /// Size in bytes of the tuples as four 32-bit fields per grid cell.
    pub fn plain_tuple_bytes(&self) -> usize {
        self.len() * 16
    }
}

fn check_field(v: u32, lo: u32, hi: u32) -> Result<()> {
    if v < lo || v > hi {
        Err(Error::OutOfRange {
            pos: v as u64,
            lo: lo as u64,
            hi: hi as u64,
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventTuple {
    pub day: u32,
    pub employee: u32,
    pub time: u32,
    pub activity: u32,
}

impl EventTuple {
    pub fn new(day: u32, employee: u32, time: u32, activity: u32) -> Self {
        Self {
            day,
            employee,
            time,
            activity,
        }
    }
}

/// Every cell of the grid in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventGrid {
    config: GridConfig,
    activities: Vec<u32>,
}

impl EventGrid {
    /// Places sparse tuples on the grid; unlisted cells become [`ABSENT`].
    pub fn expand(tuples: &[EventTuple], config: GridConfig) -> Result<Self> {
        config.validate()?;
        let mut activities = vec![ABSENT; config.len()];
        let mut filled = crate::bits::RawBits::zeros(config.len());
        for t in tuples {
            config.check_cell(t.day, t.employee, t.time).map_err(|_| {
                Error::Ingestion(format!(
                    "tuple {:?} outside grid {}x{}x{}",
                    (t.day, t.employee, t.time),
                    config.days,
                    config.employees,
                    config.resolution
                ))
            })?;
            if t.activity > config.activities {
                return Err(Error::Ingestion(format!(
                    "activity {} exceeds {} at day {}, employee {}, time {}",
                    t.activity, config.activities, t.day, t.employee, t.time
                )));
            }
            let idx = config.position_unchecked(t.day, t.employee, t.time) - 1;
            if filled.get(idx) {
                return Err(Error::DuplicateCell {
                    day: t.day,
                    employee: t.employee,
                    time: t.time,
                });
            }
            filled.set(idx);
            activities[idx] = t.activity;
        }
        Ok(Self { config, activities })
    }

    /// Wraps a dense activity array already in canonical order.
    pub fn from_activities(config: GridConfig, activities: Vec<u32>) -> Result<Self> {
        config.validate()?;
        if activities.len() != config.len() {
            return Err(Error::Ingestion(format!(
                "expected {} cells, got {}",
                config.len(),
                activities.len()
            )));
        }
        if let Some(&a) = activities.iter().find(|&&a| a > config.activities) {
            return Err(Error::Ingestion(format!("activity code {a} out of range")));
        }
        Ok(Self { config, activities })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn activities(&self) -> &[u32] {
        &self.activities
    }

    pub fn len(&self) -> usize {
        self.activities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty()
    }

    pub fn get(&self, day: u32, employee: u32, time: u32) -> Result<u32> {
        Ok(self.activities[self.config.position_of(day, employee, time)? - 1])
    }

    /// Activity codes of one (day, employee) block.
    pub fn block(&self, day: u32, employee: u32) -> &[u32] {
        let start = self.config.position_unchecked(day, employee, 1) - 1;
        &self.activities[start..start + self.config.block_len()]
    }

    /// Non-absent cells as tuples in canonical order.
    pub fn to_tuples(&self) -> Vec<EventTuple> {
        let c = &self.config;
        let mut out = Vec::new();
        for (i, &a) in self.activities.iter().enumerate() {
            if a != ABSENT {
                let (d, e, t) = c.decode(i + 1).unwrap();
                out.push(EventTuple::new(d, e, t, a));
            }
        }
        out
    }
}

/// Tuples read from a TSV file plus the grid shape recorded in its header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleFile {
    pub header: Option<GridConfig>,
    pub tuples: Vec<EventTuple>,
}

impl TupleFile {
    /// Grid shape from the header, else the smallest grid holding every tuple.
    pub fn infer_config(&self) -> Result<GridConfig> {
        if let Some(c) = self.header {
            return Ok(c);
        }
        let max = |f: fn(&EventTuple) -> u32| self.tuples.iter().map(f).max().unwrap_or(1).max(1);
        GridConfig::new(
            max(|t| t.day),
            max(|t| t.employee),
            max(|t| t.time),
            max(|t| t.activity),
        )
    }
}

/// Parses `day\temployee\ttime\tactivity` lines. Blank lines and `#`
/// comments are skipped; a `# evseq-tuples key=value ...` comment supplies the
/// grid shape.
pub fn parse_tuples(text: &str) -> Result<TupleFile> {
    let mut header = None;
    let mut tuples = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(TSV_HEADER_TAG) {
            header = Some(parse_header(rest, line_no)?);
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        let mut v = [0u32; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("not a non-negative integer: {f:?}"),
            })?;
        }
        tuples.push(EventTuple::new(v[0], v[1], v[2], v[3]));
    }
    Ok(TupleFile { header, tuples })
}

fn parse_header(rest: &str, line: usize) -> Result<GridConfig> {
    let mut kv = BTreeMap::new();
    for tok in rest.split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            kv.insert(k, v);
        }
    }
    let get = |k: &str| -> Result<u32> {
        kv.get(k)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("header missing {k}="),
            })?
            .parse()
            .map_err(|_| Error::Parse {
                line,
                msg: format!("header field {k} is not an integer"),
            })
    };
    GridConfig::new(
        get("days")?,
        get("employees")?,
        get("resolution")?,
        get("activities")?,
    )
    .map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })
}

/// Renders tuples in the TSV format with a header carrying `config` and any
/// extra `key=value` pairs.
pub fn write_tuples(config: &GridConfig, extra: &[(&str, String)], tuples: &[EventTuple]) -> String {
    let mut out = String::with_capacity(tuples.len() * 16 + 128);
    write!(
        out,
        "{TSV_HEADER_TAG} days={} employees={} resolution={} activities={}",
        config.days, config.employees, config.resolution, config.activities
    )
    .unwrap();
    for (k, v) in extra {
        write!(out, " {k}={v}").unwrap();
    }
    out.push('\n');
    for t in tuples {
        writeln!(out, "{}\t{}\t{}\t{}", t.day, t.employee, t.time, t.activity).unwrap();
    }
    out
}

/// Maps external activity names to codes `1..=A`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    names: BTreeMap<u32, String>,
    codes: BTreeMap<String, u32>,
}

impl Dictionary {
    /// Parses `code\tname` lines (`#` comments allowed).
    pub fn parse(text: &str) -> Result<Self> {
        let mut d = Dictionary::default();
        for (ln, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (code, name) = t.split_once('\t').ok_or_else(|| Error::Parse {
                line: ln + 1,
                msg: "expected code<TAB>name".into(),
            })?;
            let code: u32 = code.trim().parse().map_err(|_| Error::Parse {
                line: ln + 1,
                msg: format!("bad activity code {code:?}"),
            })?;
            d.insert(code, name.trim()).map_err(|e| Error::Parse {
                line: ln + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(d)
    }

    pub fn insert(&mut self, code: u32, name: &str) -> Result<()> {
        if code == ABSENT {
            return Err(Error::Ingestion("code 0 is reserved for absence".into()));
        }
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::Ingestion(format!("invalid activity name {name:?}")));
        }
        if self.names.contains_key(&code) || self.codes.contains_key(name) {
            return Err(Error::Ingestion(format!("duplicate entry {code}\t{name}")));
        }
        self.names.insert(code, name.to_string());
        self.codes.insert(name.to_string(), code);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn max_code(&self) -> Option<u32> {
        self.names.keys().next_back().copied()
    }

    pub fn code(&self, name: &str) -> Option<u32> {
        self.codes.get(name).copied()
    }

    pub fn name(&self, code: u32) -> Option<&str> {
        self.names.get(&code).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.names.iter().map(|(&c, n)| (c, n.as_str()))
    }

    /// Resolves an activity token: a dictionary name, else a numeric code.
    pub fn resolve(&self, token: &str) -> Option<u32> {
        self.code(token).or_else(|| token.parse().ok())
    }

    /// External spelling of a code: its name if known, else the number.
    pub fn display(&self, code: u32) -> String {
        self.name(code)
            .map(str::to_string)
            .unwrap_or_else(|| code.to_string())
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|(c, n)| format!("{c}\t{n}\n")).collect()
    }
}
