//! Deterministic synthetic shift-work datasets and random query workloads.
//!
//! Each day, every employee works with probability `work_prob`. A working
//! employee covers one of two fixed shifts of `round(shift_frac·R)` instants,
//! the first or the last ones of the day. Inside the shift activities form
//! runs of length `1 + Geometric(1/mean_run)` (mean `mean_run`, cut at the shift
//! end) with no two neighbouring runs sharing an activity.
//!
//! Randomness comes from ChaCha8 seeded with `GenSpec::seed`; each day draws
//! from its own stream, so output is independent of generation order.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Geometric, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{EventTuple, GridConfig};
use crate::query::{Query, QueryKind};

/// Identifier of the pseudo-random generator recorded in output headers.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivityDist {
    Uniform,
    /// Zipf law over `1..=A` with exponent `s`.
    Zipf(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub config: GridConfig,
    pub seed: u64,
    pub work_prob: f64,
    pub shift_frac: f64,
    pub mean_run: f64,
    pub activity_dist: ActivityDist,
}

impl GenSpec {
    /// Defaults: 500 days, 80% of employees per day, half-day shifts, runs of 30.
    pub fn new(employees: u32, resolution: u32, activities: u32, seed: u64) -> Result<Self> {
        let spec = Self {
            config: GridConfig::new(500, employees, resolution, activities)?,
            seed,
            work_prob: 0.8,
            shift_frac: 0.5,
            mean_run: 30.0,
            activity_dist: ActivityDist::Uniform,
        };
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.config
            .validate()
            .map_err(|e| Error::InvalidSpec(e.to_string()))?;
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.work_prob) {
            return Err(Error::InvalidSpec(format!("work_prob {} outside [0, 1]", self.work_prob)));
        }
        if !unit(self.shift_frac) {
            return Err(Error::InvalidSpec(format!("shift_frac {} outside [0, 1]", self.shift_frac)));
        }
        if !(self.mean_run >= 1.0 && self.mean_run.is_finite()) {
            return Err(Error::InvalidSpec(format!("mean_run {} below 1", self.mean_run)));
        }
        if let ActivityDist::Zipf(s) = self.activity_dist {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidSpec(format!("zipf exponent {s} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// Instants worked by a working employee in one day.
    pub fn shift_len(&self) -> u32 {
        (self.shift_frac * self.config.resolution as f64).round() as u32
    }
}

enum ActSampler {
    Uniform(u32),
    Zipf(Zipf<f64>),
}

impl ActSampler {
    fn new(spec: &GenSpec) -> Result<Self> {
        let a = spec.config.activities;
        Ok(match spec.activity_dist {
            ActivityDist::Uniform => ActSampler::Uniform(a),
            ActivityDist::Zipf(s) => ActSampler::Zipf(
                Zipf::new(a as u64, s).map_err(|e| Error::InvalidSpec(format!("zipf: {e}")))?,
            ),
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        match self {
            ActSampler::Uniform(a) => rng.gen_range(1..=*a),
            ActSampler::Zipf(z) => z.sample(rng) as u32,
        }
    }
}

/// Tuples of a synthetic dataset in canonical (day, employee, time) order.
pub fn gen_dataset(spec: &GenSpec) -> Result<Vec<EventTuple>> {
    spec.validate()?;
    let c = spec.config;
    let shift = spec.shift_len();
    let acts = ActSampler::new(spec)?;
    let runs = Geometric::new(1.0 / spec.mean_run).map_err(|e| Error::InvalidSpec(format!("mean_run: {e}")))?;
    let mut out = Vec::new();
    for day in 1..=c.days {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(day as u64);
        for employee in 1..=c.employees {
            if !rng.gen_bool(spec.work_prob) {
                continue;
            }
            let first = if rng.gen_bool(0.5) { 1 } else { c.resolution - shift + 1 };
            let end = first + shift;
            let mut t = first;
            let mut prev = None;
            while t < end {
                let len = (1 + runs.sample(&mut rng)).min((end - t) as u64) as u32;
                let mut a = acts.sample(&mut rng);
                while c.activities > 1 && Some(a) == prev {
                    a = acts.sample(&mut rng);
                }
                for i in 0..len {
                    out.push(EventTuple::new(day, employee, t + i, a));
                }
                prev = Some(a);
                t += len;
            }
        }
    }
    Ok(out)
}

/// Statistics measured on generated tuples, written next to the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub tuples: usize,
    pub runs: usize,
    pub mean_run_length: f64,
    pub worked_employee_days: usize,
    pub worked_fraction: f64,
}

impl DatasetStats {
    /// Runs are maximal stretches of consecutive instants of one block with
    /// the same activity. `tuples` must be in canonical order.
    pub fn measure(tuples: &[EventTuple], config: &GridConfig) -> Self {
        let mut runs = 0;
        let mut worked = 0;
        let mut prev: Option<&EventTuple> = None;
        for t in tuples {
            let same_block = prev.is_some_and(|p| p.day == t.day && p.employee == t.employee);
            if !same_block {
                worked += 1;
            }
            let continues = same_block && prev.is_some_and(|p| p.time + 1 == t.time && p.activity == t.activity);
            if !continues {
                runs += 1;
            }
            prev = Some(t);
        }
        let blocks = config.days as usize * config.employees as usize;
        Self {
            tuples: tuples.len(),
            runs,
            mean_run_length: if runs == 0 { 0.0 } else { tuples.len() as f64 / runs as f64 },
            worked_employee_days: worked,
            worked_fraction: worked as f64 / blocks as f64,
        }
    }
}

/// `count` random in-range queries of one kind. Activities are uniform over
/// `0..=A`; day intervals are uniform over ordered pairs `d1 <= d2`.
pub fn gen_queries(kind: QueryKind, count: usize, config: &GridConfig, seed: u64) -> Result<Vec<Query>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 << 32 | kind.index());
    let mut day = |rng: &mut ChaCha8Rng| rng.gen_range(1..=config.days);
    let interval = |rng: &mut ChaCha8Rng, day: &mut dyn FnMut(&mut ChaCha8Rng) -> u32| loop {
        let (x, y) = (day(rng), day(rng));
        if x <= y {
            break (x, y);
        }
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let emp = |rng: &mut ChaCha8Rng| rng.gen_range(1..=config.employees);
        let act = |rng: &mut ChaCha8Rng| rng.gen_range(0..=config.activities);
        let q = match kind {
            QueryKind::Acc => Query::Acc {
                day: day(&mut rng),
                employee: emp(&mut rng),
                time: rng.gen_range(1..=config.resolution),
            },
            QueryKind::C1D1E1A => Query::C1D1E1A {
                day: day(&mut rng),
                employee: emp(&mut rng),
                activity: act(&mut rng),
            },
            QueryKind::C1DaE1A => Query::C1DaE1A {
                day: day(&mut rng),
                activity: act(&mut rng),
            },
            QueryKind::CrD1E1A => {
                let (d1, d2) = interval(&mut rng, &mut day);
                Query::CrD1E1A {
                    d1,
                    d2,
                    employee: emp(&mut rng),
                    activity: act(&mut rng),
                }
            }
            QueryKind::CrDaE1A => {
                let (d1, d2) = interval(&mut rng, &mut day);
                Query::CrDaE1A {
                    d1,
                    d2,
                    activity: act(&mut rng),
                }
            }
        };
        debug_assert!(q.validate(config).is_ok());
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> GenSpec {
        GenSpec {
            config: GridConfig::new(20, 10, 96, 6).unwrap(),
            ..GenSpec::new(10, 96, 6, seed).unwrap()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = gen_dataset(&small(7)).unwrap();
        assert_eq!(a, gen_dataset(&small(7)).unwrap());
        assert_ne!(a, gen_dataset(&small(8)).unwrap());
        let c = small(0).config;
        for k in QueryKind::ALL {
            assert_eq!(gen_queries(k, 50, &c, 3).unwrap(), gen_queries(k, 50, &c, 3).unwrap());
        }
    }

    #[test]
    fn shifts_and_runs() {
        let spec = small(1);
        let tuples = gen_dataset(&spec).unwrap();
        let mut per_block = std::collections::BTreeMap::<(u32, u32), Vec<&EventTuple>>::new();
        for t in &tuples {
            per_block.entry((t.day, t.employee)).or_default().push(t);
        }
        for ts in per_block.values() {
            assert_eq!(ts.len(), 48);
            let first = ts[0].time;
            assert!(first == 1 || first == 49);
            assert!(ts.iter().enumerate().all(|(i, t)| t.time == first + i as u32));
            assert!(ts.iter().all(|t| (1..=6).contains(&t.activity)));
        }
        let mut sorted = tuples.clone();
        sorted.sort();
        assert_eq!(sorted, tuples);
    }

    #[test]
    fn limit_cases() {
        let none = GenSpec {
            work_prob: 0.0,
            ..small(1)
        };
        assert!(gen_dataset(&none).unwrap().is_empty());
        let whole = GenSpec {
            mean_run: 48.0 * 1000.0,
            ..small(1)
        };
        let t = gen_dataset(&whole).unwrap();
        let s = DatasetStats::measure(&t, &whole.config);
        assert!(s.runs <= s.worked_employee_days + 2, "{s:?}");
    }

    #[test]
    fn invalid_specs() {
        for bad in [
            GenSpec { work_prob: 1.5, ..small(1) },
            GenSpec { shift_frac: -0.1, ..small(1) },
            GenSpec { mean_run: 0.5, ..small(1) },
            GenSpec { activity_dist: ActivityDist::Zipf(f64::NAN), ..small(1) },
        ] {
            assert!(matches!(gen_dataset(&bad), Err(Error::InvalidSpec(_))));
        }
    }

    #[test]
    fn queries_in_range() {
        let c = GridConfig::new(5, 3, 10, 4).unwrap();
        assert!(gen_queries(QueryKind::Acc, 0, &c, 1).unwrap().is_empty());
        for k in QueryKind::ALL {
            let qs = gen_queries(k, 2000, &c, 11).unwrap();
            assert!(qs.iter().all(|q| q.kind() == k && q.validate(&c).is_ok()));
        }
    }
}
