//! Access and counting queries over the event grid, and their text form.
//!
//! Counting kinds follow the `C-xD-yE-zA` naming: `x`, `y`, `z` say whether
//! days, employees and activities are fixed to one value (`1`), a range
//! (`r`) or unrestricted (`a`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{Dictionary, GridConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QueryKind {
    #[serde(rename = "Acc")]
    Acc,
    #[serde(rename = "C-1D-1E-1A")]
    C1D1E1A,
    #[serde(rename = "C-1D-aE-1A")]
    C1DaE1A,
    #[serde(rename = "C-rD-1E-1A")]
    CrD1E1A,
    #[serde(rename = "C-rD-aE-1A")]
    CrDaE1A,
}

impl QueryKind {
    pub const ALL: [QueryKind; 5] = [
        QueryKind::Acc,
        QueryKind::C1D1E1A,
        QueryKind::C1DaE1A,
        QueryKind::CrD1E1A,
        QueryKind::CrDaE1A,
    ];

    pub const COUNTING: [QueryKind; 4] = [
        QueryKind::C1D1E1A,
        QueryKind::C1DaE1A,
        QueryKind::CrD1E1A,
        QueryKind::CrDaE1A,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Acc => "Acc",
            QueryKind::C1D1E1A => "C-1D-1E-1A",
            QueryKind::C1DaE1A => "C-1D-aE-1A",
            QueryKind::CrD1E1A => "C-rD-1E-1A",
            QueryKind::CrDaE1A => "C-rD-aE-1A",
        }
    }

    /// Leading keyword of the query's text line.
    pub fn keyword(self) -> &'static str {
        match self {
            QueryKind::Acc => "ACC",
            QueryKind::C1D1E1A => "C1",
            QueryKind::C1DaE1A => "C1A",
            QueryKind::CrD1E1A => "CR",
            QueryKind::CrDaE1A => "CRA",
        }
    }

    fn arity(self) -> usize {
        match self {
            QueryKind::C1DaE1A => 2,
            QueryKind::Acc | QueryKind::C1D1E1A | QueryKind::CrDaE1A => 3,
            QueryKind::CrD1E1A => 4,
        }
    }

    /// Stable small integer, used to derive per-kind random streams.
    pub fn index(self) -> u64 {
        QueryKind::ALL.iter().position(|&k| k == self).unwrap() as u64
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    /// Accepts the long name (`C-rD-1E-1A`) or the line keyword (`CR`), any case.
    fn from_str(s: &str) -> Result<Self> {
        QueryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || k.keyword().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("query kind {s:?}")))
    }
}

/// A single query. Days, employees and times are 1-based; activities are
/// grid codes (0 = absent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Query {
    /// Activity at one cell.
    Acc { day: u32, employee: u32, time: u32 },
    /// Instants one employee spent on an activity during one day.
    C1D1E1A { day: u32, employee: u32, activity: u32 },
    /// Instants all employees spent on an activity during one day.
    C1DaE1A { day: u32, activity: u32 },
    /// Instants one employee spent on an activity over days `d1..=d2`.
    CrD1E1A { d1: u32, d2: u32, employee: u32, activity: u32 },
    /// Instants all employees spent on an activity over days `d1..=d2`.
    CrDaE1A { d1: u32, d2: u32, activity: u32 },
}

impl Query {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Acc { .. } => QueryKind::Acc,
            Query::C1D1E1A { .. } => QueryKind::C1D1E1A,
            Query::C1DaE1A { .. } => QueryKind::C1DaE1A,
            Query::CrD1E1A { .. } => QueryKind::CrD1E1A,
            Query::CrDaE1A { .. } => QueryKind::CrDaE1A,
        }
    }

    /// `(d1, d2, employee, activity)` of a counting query; `None` for Acc.
    pub fn counting_scope(&self) -> Option<(u32, u32, Option<u32>, u32)> {
        match *self {
            Query::Acc { .. } => None,
            Query::C1D1E1A { day, employee, activity } => Some((day, day, Some(employee), activity)),
            Query::C1DaE1A { day, activity } => Some((day, day, None, activity)),
            Query::CrD1E1A { d1, d2, employee, activity } => Some((d1, d2, Some(employee), activity)),
            Query::CrDaE1A { d1, d2, activity } => Some((d1, d2, None, activity)),
        }
    }

    pub fn validate(&self, config: &GridConfig) -> Result<()> {
        match *self {
            Query::Acc { day, employee, time } => config.check_cell(day, employee, time),
            _ => {
                let (d1, d2, emp, act) = self.counting_scope().unwrap();
                check_days(config, d1, d2)?;
                if let Some(e) = emp {
                    config.check_employee(e)?;
                }
                config.check_activity(act)
            }
        }
    }

    /// Parses one query line: `ACC d e t`, `C1 d e a`, `C1A d a`,
    /// `CR d1 d2 e a` or `CRA d1 d2 a`. Activities go through `dict`.
    /// Range checks against a grid are left to [`validate`](Self::validate).
    pub fn parse_line(text: &str, line: usize, dict: &Dictionary) -> Result<Query> {
        let perr = |msg: String| Error::Parse { line, msg };
        let mut toks = text.split_whitespace();
        let kw = toks.next().ok_or_else(|| perr("empty query".into()))?;
        let kind = QueryKind::ALL
            .into_iter()
            .find(|k| k.keyword().eq_ignore_ascii_case(kw))
            .ok_or_else(|| perr(format!("unknown query keyword {kw:?}")))?;
        let args: Vec<&str> = toks.collect();
        if args.len() != kind.arity() {
            return Err(perr(format!(
                "{} takes {} arguments, found {}",
                kind.keyword(),
                kind.arity(),
                args.len()
            )));
        }
        let num = |i: usize| -> Result<u32> {
            args[i]
                .parse()
                .map_err(|_| perr(format!("not a non-negative integer: {:?}", args[i])))
        };
        let act = |i: usize| -> Result<u32> {
            dict.resolve(args[i])
                .ok_or_else(|| perr(format!("unknown activity {:?}", args[i])))
        };
        Ok(match kind {
            QueryKind::Acc => Query::Acc {
                day: num(0)?,
                employee: num(1)?,
                time: num(2)?,
            },
            QueryKind::C1D1E1A => Query::C1D1E1A {
                day: num(0)?,
                employee: num(1)?,
                activity: act(2)?,
            },
            QueryKind::C1DaE1A => Query::C1DaE1A {
                day: num(0)?,
                activity: act(1)?,
            },
            QueryKind::CrD1E1A => Query::CrD1E1A {
                d1: num(0)?,
                d2: num(1)?,
                employee: num(2)?,
                activity: act(3)?,
            },
            QueryKind::CrDaE1A => Query::CrDaE1A {
                d1: num(0)?,
                d2: num(1)?,
                activity: act(2)?,
            },
        })
    }

    /// Text form accepted by [`parse_line`](Self::parse_line).
    pub fn format(&self, dict: &Dictionary) -> String {
        let kw = self.kind().keyword();
        match *self {
            Query::Acc { day, employee, time } => format!("{kw} {day} {employee} {time}"),
            Query::C1D1E1A { day, employee, activity } => {
                format!("{kw} {day} {employee} {}", dict.display(activity))
            }
            Query::C1DaE1A { day, activity } => format!("{kw} {day} {}", dict.display(activity)),
            Query::CrD1E1A { d1, d2, employee, activity } => {
                format!("{kw} {d1} {d2} {employee} {}", dict.display(activity))
            }
            Query::CrDaE1A { d1, d2, activity } => {
                format!("{kw} {d1} {d2} {}", dict.display(activity))
            }
        }
    }
}

/// Parses a query file; blank lines and `#` comments are skipped.
pub fn parse_queries(text: &str, dict: &Dictionary) -> Result<Vec<Query>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| Query::parse_line(l, i + 1, dict))
        .collect()
}

pub(crate) fn check_days(config: &GridConfig, d1: u32, d2: u32) -> Result<()> {
    config.check_day(d1)?;
    config.check_day(d2)?;
    if d2 < d1 {
        return Err(Error::OutOfRange {
            pos: d2 as u64,
            lo: d1 as u64,
            hi: config.days as u64,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> Dictionary {
        Dictionary::parse("1\tA\n2\tB\n3\tC\n4\tD\n5\tE\n").unwrap()
    }

    #[test]
    fn parse_and_format() {
        let d = dict();
        let lines = ["ACC 1 2 1", "C1 1 2 E", "C1A 3 A", "CR 1 2 2 E", "CRA 1 3 0"];
        let want = [
            Query::Acc { day: 1, employee: 2, time: 1 },
            Query::C1D1E1A { day: 1, employee: 2, activity: 5 },
            Query::C1DaE1A { day: 3, activity: 1 },
            Query::CrD1E1A { d1: 1, d2: 2, employee: 2, activity: 5 },
            Query::CrDaE1A { d1: 1, d2: 3, activity: 0 },
        ];
        for (l, w) in lines.iter().zip(want) {
            let q = Query::parse_line(l, 1, &d).unwrap();
            assert_eq!(q, w);
            assert_eq!(q.format(&d), *l);
        }
        assert_eq!(Query::parse_line("cr 1 2 2 5", 1, &d), Ok(want[3]));
    }

    #[test]
    fn parse_errors() {
        let d = dict();
        assert!(matches!(Query::parse_line("C1A 1 Z", 4, &d), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(Query::parse_line("C1 1 2", 1, &d), Err(Error::Parse { .. })));
        assert!(matches!(Query::parse_line("XX 1", 1, &d), Err(Error::Parse { .. })));
        assert!(matches!(Query::parse_line("ACC -1 1 1", 1, &d), Err(Error::Parse { .. })));
        let err = parse_queries("ACC 1 1 1\n\n# c\nACC x 1 1\n", &d).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn validation() {
        let c = GridConfig::new(3, 2, 3, 5).unwrap();
        assert!(Query::CrDaE1A { d1: 1, d2: 3, activity: 5 }.validate(&c).is_ok());
        assert!(Query::CrDaE1A { d1: 2, d2: 1, activity: 5 }.validate(&c).is_err());
        assert!(Query::CrDaE1A { d1: 1, d2: 4, activity: 5 }.validate(&c).is_err());
        assert!(Query::C1DaE1A { day: 1, activity: 6 }.validate(&c).is_err());
        assert!(Query::C1D1E1A { day: 1, employee: 3, activity: 1 }.validate(&c).is_err());
        assert!(Query::Acc { day: 1, employee: 1, time: 4 }.validate(&c).is_err());
    }

    #[test]
    fn kind_names() {
        for k in QueryKind::ALL {
            assert_eq!(k.name().parse::<QueryKind>(), Ok(k));
            assert_eq!(k.keyword().parse::<QueryKind>(), Ok(k));
        }
        assert_eq!(serde_json::to_string(&QueryKind::CrD1E1A).unwrap(), "\"C-rD-1E-1A\"");
    }
}
