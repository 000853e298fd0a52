use evseq::baseline::BaselineSeq;
use evseq::chain::IndexChain;
use evseq::codec::Persist;
use evseq::event::{EventGrid, GridConfig};
use evseq::generator::gen_queries;
use evseq::level::IndexLevel;
use evseq::query::{Query, QueryKind};
use evseq::wtmap::WtMapLevel;
use evseq::wtrle::WtRleLevel;
use evseq_oracle::NaiveGridOracle;
use proptest::prelude::*;

/// Random grid whose blocks are filled with runs (activity 0 included) of
/// length about `mean`.
fn grids() -> impl Strategy<Value = EventGrid> {
    (1u32..=10, 1u32..=6, 1u32..=40, 1u32..=8, prop_oneof![Just(1u64), Just(5), Just(50)], any::<u64>()).prop_map(
        |(d, e, r, a, mean, seed)| {
            let c = GridConfig::new(d, e, r, a).unwrap();
            let mut x = seed | 1;
            let mut next = move || {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                x
            };
            let mut acts = Vec::with_capacity(c.len());
            for _ in 0..(d * e) {
                let mut t = 0;
                while t < r {
                    let len = (1 + next() % (2 * mean)).min((r - t) as u64) as u32;
                    let s = (next() % (a as u64 + 1)) as u32;
                    acts.extend(std::iter::repeat_n(s, len as usize));
                    t += len;
                }
            }
            EventGrid::from_activities(c, acts).unwrap()
        },
    )
}

fn all_queries(c: &GridConfig, per_kind: usize, seed: u64) -> Vec<Query> {
    QueryKind::ALL
        .iter()
        .flat_map(|&k| gen_queries(k, per_kind, c, seed).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_structure_agrees_with_the_scan(grid in grids(), seed in any::<u64>()) {
        let oracle = NaiveGridOracle::new(grid.clone());
        let rle = IndexChain::<WtRleLevel>::build(&grid).unwrap();
        let map = IndexChain::<WtMapLevel>::build(&grid).unwrap();
        let base = BaselineSeq::build(&grid).unwrap();
        for q in all_queries(grid.config(), 400, seed) {
            let want = oracle.answer(&q).unwrap();
            prop_assert_eq!(rle.answer(&q).unwrap(), want, "wtrle {:?}", q);
            prop_assert_eq!(map.answer(&q).unwrap(), want, "wtmap {:?}", q);
            prop_assert_eq!(base.answer(&q).unwrap(), want, "baseline {:?}", q);
            if q.kind() != QueryKind::Acc {
                prop_assert_eq!(base.count(&q).unwrap(), want);
            }
        }
    }

    #[test]
    fn exhaustive_access(grid in grids()) {
        let c = *grid.config();
        let map = IndexChain::<WtMapLevel>::build(&grid).unwrap();
        let base = BaselineSeq::build(&grid).unwrap();
        for d in 1..=c.days {
            for e in 1..=c.employees {
                for t in 1..=c.resolution {
                    let want = grid.get(d, e, t).unwrap();
                    prop_assert_eq!(map.query_acc(d, e, t).unwrap(), want);
                    prop_assert_eq!(base.access(d, e, t).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn routes_additivity_and_conservation(grid in grids()) {
        let c = *grid.config();
        let ch = IndexChain::<WtRleLevel>::build(&grid).unwrap();
        for a in 0..=c.activities {
            for e in 1..=c.employees {
                for d in 1..=c.days {
                    prop_assert_eq!(
                        ch.count_act_emp_one_day_direct(a, e, d).unwrap(),
                        ch.count_act_emp_days(a, e, d, d).unwrap()
                    );
                }
            }
            let mut prev = 0;
            for d2 in 1..=c.days {
                let upto = ch.count_act_days(a, 1, d2).unwrap();
                prop_assert!(upto >= prev);
                prev = upto;
                for d1 in 1..=d2 {
                    let before = if d1 == 1 { 0 } else { ch.count_act_days(a, 1, d1 - 1).unwrap() };
                    prop_assert_eq!(ch.count_act_days(a, d1, d2).unwrap(), upto - before);
                }
            }
        }
        for d in 1..=c.days {
            let total: u64 = (0..=c.activities).map(|a| ch.count_act_days(a, d, d).unwrap()).sum();
            prop_assert_eq!(total, c.day_len() as u64);
        }
    }

    #[test]
    fn employee_level_input_is_the_activity_sort(grid in grids()) {
        let c = *grid.config();
        let ch = IndexChain::<WtMapLevel>::build(&grid).unwrap();
        let mut cells: Vec<(u32, usize)> = grid.activities().iter().enumerate().map(|(i, &a)| (a, i)).collect();
        cells.sort();
        let l2 = &ch.levels()[1];
        for (p, &(_, i)) in cells.iter().enumerate() {
            let (_, e, _) = c.decode(i + 1).unwrap();
            prop_assert_eq!(l2.expanded_access(p + 1).unwrap(), e - 1);
        }
        // level-2 leaf order: sorted by (employee, activity, day, time)
        let mut by_emp: Vec<(u32, u32, usize)> = cells
            .iter()
            .map(|&(a, i)| (c.decode(i + 1).unwrap().1, a, i))
            .collect();
        by_emp.sort();
        for (k, &(e, _, _)) in by_emp.iter().enumerate() {
            prop_assert!(l2.leaf_offset(e - 1) <= k && k < l2.leaf_offset(e));
        }
    }

    #[test]
    fn serialized_chains_answer_identically(grid in grids(), seed in any::<u64>()) {
        let map = IndexChain::<WtMapLevel>::build(&grid).unwrap();
        let back = IndexChain::<WtMapLevel>::from_bytes(&map.to_bytes()).unwrap();
        let base = BaselineSeq::build(&grid).unwrap();
        let base_back = BaselineSeq::from_bytes(&base.to_bytes()).unwrap();
        for q in all_queries(grid.config(), 50, seed) {
            prop_assert_eq!(back.answer(&q).unwrap(), map.answer(&q).unwrap());
            prop_assert_eq!(base_back.answer(&q).unwrap(), base.answer(&q).unwrap());
        }
    }
}

#[test]
fn absent_sentinel_fills_idle_blocks() {
    let c = GridConfig::new(3, 4, 10, 5).unwrap();
    let grid = EventGrid::expand(&[], c).unwrap();
    let ch = IndexChain::<WtMapLevel>::build(&grid).unwrap();
    assert_eq!(ch.levels()[0].expanded_rank(0, c.len()).unwrap(), c.len());
    for q in all_queries(&c, 200, 5) {
        let want = NaiveGridOracle::new(grid.clone()).answer(&q).unwrap();
        assert_eq!(ch.answer(&q).unwrap(), want);
    }
    assert_eq!(ch.count_act_emp_one_day_direct(0, 2, 3).unwrap(), 10);
}
