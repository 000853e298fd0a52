use evseq::codec::Persist;
use evseq::level::IndexLevel;
use evseq::wavelet::{PlainWaveletTree, RleWaveletTree};
use evseq::wtmap::WtMapLevel;
use evseq::wtrle::WtRleLevel;
use evseq_oracle::{naive_leaf_offset, naive_leaf_order, naive_runs, naive_symbol_rank};
use proptest::prelude::*;

/// Sequences made of runs with the given mean length bucket.
fn run_sequences(max_len: usize, max_sigma: u32) -> impl Strategy<Value = (Vec<u32>, u32)> {
    (1..=max_sigma, prop_oneof![Just(1usize), Just(5), Just(50)], 0..=max_len, any::<u64>()).prop_map(
        |(sigma, mean, n, seed)| {
            let mut x = seed | 1;
            let mut next = move || {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                x
            };
            let mut seq = Vec::with_capacity(n);
            while seq.len() < n {
                let s = (next() % sigma as u64) as u32;
                let len = 1 + (next() % (2 * mean as u64)) as usize;
                seq.extend(std::iter::repeat_n(s, len.min(n - seq.len())));
            }
            (seq, sigma)
        },
    )
}

fn check_level<L: IndexLevel>(l: &L, seq: &[u32], sigma: u32) {
    let n = seq.len();
    assert_eq!(l.len(), n);
    for c in 0..=sigma {
        assert_eq!(l.leaf_offset(c), naive_leaf_offset(seq, c), "leaf_offset({c})");
    }
    for (i, &s) in seq.iter().enumerate() {
        assert_eq!(l.expanded_access(i + 1).unwrap(), s);
    }
    let mut counts = vec![0usize; sigma as usize];
    for p in 0..=n {
        if p > 0 {
            counts[seq[p - 1] as usize] += 1;
        }
        for c in 0..sigma {
            let r = counts[c as usize];
            assert_eq!(l.expanded_rank(c, p).unwrap(), r, "rank({c}, {p})");
            assert_eq!(l.leaf_position(c, p).unwrap(), l.leaf_offset(c) + r);
        }
    }
    assert!(l.expanded_rank(sigma, 0).is_err());
    assert!(l.expanded_rank(0, n + 1).is_err());
    assert!(l.expanded_access(n + 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wavelet_round_trip_and_backends_agree((seq, sigma) in run_sequences(10_000, 256)) {
        let p = PlainWaveletTree::build(&seq, sigma).unwrap();
        let r = RleWaveletTree::build(&seq, sigma).unwrap();
        for (i, &s) in seq.iter().enumerate() {
            prop_assert_eq!(p.access(i + 1).unwrap(), s);
            prop_assert_eq!(r.access(i + 1).unwrap(), s);
        }
        use evseq::bits::RankSelect;
        prop_assert!(p.levels().iter().all(|l| l.len() == seq.len()));
        prop_assert!(r.levels().iter().all(|l| l.len() == seq.len()));
        let step = (seq.len() / 50).max(1);
        for c in (0..sigma).step_by((sigma as usize / 8).max(1)) {
            for i in (0..=seq.len()).step_by(step) {
                let want = naive_symbol_rank(&seq, c, i);
                prop_assert_eq!(p.rank(c, i).unwrap(), want);
                prop_assert_eq!(r.rank(c, i).unwrap(), want);
            }
        }
        prop_assert_eq!(PlainWaveletTree::from_bytes(&p.to_bytes()).unwrap(), p);
        prop_assert_eq!(RleWaveletTree::from_bytes(&r.to_bytes()).unwrap(), r);
    }

    #[test]
    fn leaf_order_is_the_stable_sort((seq, sigma) in run_sequences(400, 12)) {
        let t = RleWaveletTree::build(&seq, sigma).unwrap();
        let order = naive_leaf_order(&seq);
        // position i of seq lands at leaf_offset(c) + rank(c, i)
        let mut realized = vec![usize::MAX; seq.len()];
        for (i, &c) in seq.iter().enumerate() {
            let leaf = t.leaf_position(c, i + 1).unwrap() - 1;
            realized[leaf] = i;
        }
        prop_assert_eq!(realized, order);
    }

    #[test]
    fn levels_match_oracle((seq, sigma) in run_sequences(600, 10)) {
        let rle = WtRleLevel::build(&seq, sigma).unwrap();
        let map = WtMapLevel::build(&seq, sigma).unwrap();
        check_level(&rle, &seq, sigma);
        check_level(&map, &seq, sigma);
        prop_assert_eq!(WtMapLevel::from_bytes(&map.to_bytes()).unwrap(), map);
        prop_assert_eq!(WtRleLevel::from_bytes(&rle.to_bytes()).unwrap(), rle);
    }

    #[test]
    fn wtmap_structure((seq, sigma) in run_sequences(3_000, 20)) {
        let map = WtMapLevel::build(&seq, sigma).unwrap();
        let runs = naive_runs(&seq);
        let n = seq.len();
        prop_assert_eq!(map.run_count(), runs.len());
        use evseq::bits::RankSelect;
        prop_assert_eq!(map.marks().rank1(n), runs.len());
        prop_assert_eq!(map.run_lengths().rank1(n), runs.len());
        if !runs.is_empty() {
            prop_assert_eq!(map.run_lengths().select1(runs.len()), Some(n));
        }
        let heads: Vec<u32> = (1..=runs.len()).map(|r| map.tree().access(r).unwrap()).collect();
        prop_assert!(heads.windows(2).all(|w| w[0] != w[1]));
        prop_assert_eq!(heads, runs.iter().map(|r| r.0).collect::<Vec<_>>());
        prop_assert!(map.verify(Some(&seq)).is_ok());
    }
}

#[test]
fn wtmap_is_not_larger_on_run_rich_input() {
    for (mean, sigma) in [(10usize, 8u32), (30, 17), (100, 17)] {
        let mut x = 0x9e37_79b9_7f4a_7c15u64;
        let mut seq = Vec::new();
        while seq.len() < 200_000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let len = 1 + (x % (2 * mean as u64 - 1)) as usize;
            let s = ((x >> 32) % sigma as u64) as u32;
            seq.extend(std::iter::repeat_n(s, len));
        }
        let rle = WtRleLevel::build(&seq, sigma).unwrap().size_bytes();
        let map = WtMapLevel::build(&seq, sigma).unwrap().size_bytes();
        assert!(map <= rle, "mean run {mean}: wtmap {map} > wtrle {rle}");
    }
}

#[test]
fn run_free_input_costs_more_under_wtmap() {
    let seq: Vec<u32> = (0..10_000).map(|i| (i * 7 % 5) as u32).collect();
    let plain = PlainWaveletTree::build(&seq, 5).unwrap().size_bytes();
    let map = WtMapLevel::build(&seq, 5).unwrap();
    assert_eq!(map.run_count(), seq.len());
    assert!(map.size_bytes() > plain);
}
