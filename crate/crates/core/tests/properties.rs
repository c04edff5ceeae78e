use proptest::prelude::*;
use proptest::sample::subsequence;
use qdca_core::counting::{count_marked, CountingParams};
use qdca_core::max_finding::{find_max_subkey, CostModel, ExactCounts, MaxFindingConfig};
use qdca_core::toy_cipher::{
    deposit_bits, extract_bits, KeySchedule, MasterKey, Pbox, Sbox, ToyCipher,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permutation(len: usize) -> impl Strategy<Value = Vec<u8>> {
    Just((0..len as u8).collect::<Vec<_>>()).prop_shuffle()
}

fn cipher() -> impl Strategy<Value = ToyCipher> {
    (
        prop_oneof![Just(4u32), Just(8), Just(12), Just(16)],
        permutation(16),
        1usize..6,
    )
        .prop_flat_map(|(width, sbox, rounds)| {
            (
                Just(width),
                Just(sbox),
                permutation(width as usize),
                Just(rounds),
            )
        })
        .prop_map(|(width, sbox, pbox, rounds)| {
            let sbox = Sbox::new(sbox.try_into().unwrap()).unwrap();
            ToyCipher::new(
                width,
                sbox,
                Pbox::new(pbox).unwrap(),
                rounds,
                KeySchedule::SplitMix,
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decrypt_inverts_encrypt(c in cipher(), key in any::<u64>(), pt in any::<u64>()) {
        let pt = pt % c.block_count();
        let ct = c.encrypt(MasterKey(key), pt).unwrap();
        prop_assert!(u64::from(ct) < c.block_count());
        prop_assert_eq!(u64::from(c.decrypt(MasterKey(key), u64::from(ct)).unwrap()), pt);
    }

    #[test]
    fn encryption_is_a_permutation(c in cipher().prop_filter("small block", |c| c.block_width() <= 12), key in any::<u64>()) {
        let mut seen = vec![false; c.block_count() as usize];
        for pt in 0..c.block_count() {
            let ct = c.encrypt(MasterKey(key), pt).unwrap() as usize;
            prop_assert!(!seen[ct]);
            seen[ct] = true;
        }
    }

    #[test]
    fn ddt_rows_sum_to_sixteen(table in permutation(16)) {
        let ddt = Sbox::new(table.try_into().unwrap()).unwrap().ddt();
        for (dx, row) in ddt.iter().enumerate() {
            prop_assert_eq!(row.iter().map(|&v| u32::from(v)).sum::<u32>(), 16);
            prop_assert!(row.iter().all(|v| v % 2 == 0));
            prop_assert_eq!(row[0] == 16, dx == 0);
        }
    }

    #[test]
    fn deposit_then_extract(mask in 1u16.., value in any::<u64>()) {
        let k = mask.count_ones();
        let v = value & ((1u64 << k) - 1);
        let spread = deposit_bits(v, mask);
        prop_assert_eq!(spread & !mask, 0);
        prop_assert_eq!(extract_bits(spread, mask), v);
    }

    #[test]
    fn max_finding_invariants(counts in prop::collection::vec(0u64..64, 16), seed in any::<u64>(), c in 1u32..5) {
        let params = CountingParams::default_profile(6).unwrap();
        let cost = CostModel::new(4, &params);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut exact = ExactCounts::new(counts.clone());
        let run = find_max_subkey(&mut exact, &cost, &MaxFindingConfig { c, m0: None }, &mut rng).unwrap();
        prop_assert!(run.budget.spent <= run.budget.limit);
        prop_assert_eq!(run.stages.total(), run.budget.spent);
        prop_assert!(run.threshold.history.windows(2).all(|w| w[0].1 < w[1].1));
        prop_assert_eq!(run.threshold.history.last().map(|h| h.0), Some(run.subkey));
        for row in &run.trace {
            prop_assert_eq!(row.accepted, row.r_y_prime.is_some_and(|r| r > row.r_y));
        }
        prop_assert_eq!(run.subkey, run.threshold.y);
        prop_assert!(run.subkey < 16);
    }

    #[test]
    fn estimates_stay_in_range(marked in subsequence((0..16usize).collect::<Vec<_>>(), 0..=16), seed in any::<u64>()) {
        let params = CountingParams::default_profile(3).unwrap();
        let mut marks = vec![false; 16];
        for j in marked {
            marks[j] = true;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = count_marked(&marks, &params, &mut rng).unwrap();
        prop_assert!(e.r <= params.pair_count());
        prop_assert!(e.raw_outcome < 1 << params.t());
        prop_assert!(e.m_est >= 0.0 && e.m_est <= params.search_space() as f64 + 1e-9);
    }
}
