use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use paircode::channel::{transmit_with, ErrorMode};
use paircode::counting::{ball_size, enumerate_pair_ball};
use paircode::fcspc::{encode_pair_weight, pair_weight_fn, smod};
use paircode::irregular::{default_order, exact_np, gv_upper_bound, plotkin_lower_bound};
use paircode::pairmetric::{
    extract_word, hamming_distance, is_consistent, pair_distance, pair_distance_raw,
    pair_distance_u64, pair_read, pair_weight,
};
use paircode::{BinaryWord, DistanceMatrix, Metric};

fn word_of(n: usize) -> impl Strategy<Value = BinaryWord> {
    any::<u64>().prop_map(move |v| BinaryWord::from_u64(v & mask(n), n).unwrap())
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn pair_of_words(max_n: usize) -> impl Strategy<Value = (BinaryWord, BinaryWord)> {
    (1..=max_n).prop_flat_map(|n| (word_of(n), word_of(n)))
}

fn triple_of_words(max_n: usize) -> impl Strategy<Value = (BinaryWord, BinaryWord, BinaryWord)> {
    (1..=max_n).prop_flat_map(|n| (word_of(n), word_of(n), word_of(n)))
}

fn small_matrix() -> impl Strategy<Value = DistanceMatrix> {
    (2usize..=4).prop_flat_map(|m| {
        proptest::collection::vec(0u32..=4, m * (m - 1) / 2).prop_map(move |upper| {
            let mut it = upper.into_iter();
            let mut rows = vec![vec![0u32; m]; m];
            for i in 0..m {
                for j in i + 1..m {
                    let v = it.next().unwrap();
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            DistanceMatrix::new(rows).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn pair_distance_is_a_metric((x, y, z) in triple_of_words(40)) {
        let xy = pair_distance(&x, &y).unwrap();
        prop_assert_eq!(xy, pair_distance(&y, &x).unwrap());
        prop_assert_eq!(xy == 0, x == y);
        let xz = pair_distance(&x, &z).unwrap();
        let zy = pair_distance(&z, &y).unwrap();
        prop_assert!(xy <= xz + zy);
    }

    #[test]
    fn distance_is_weight_of_difference((x, y) in pair_of_words(64)) {
        let d = pair_distance(&x, &y).unwrap();
        prop_assert_eq!(d, pair_weight(&x.xor(&y).unwrap()));
        prop_assert_eq!(d, pair_distance_raw(&pair_read(&x), &pair_read(&y)).unwrap());
        let n = x.len();
        let fast = pair_distance_u64(x.as_u64().unwrap(), y.as_u64().unwrap(), n as u32);
        prop_assert_eq!(d, fast as usize);
    }

    #[test]
    fn complement_keeps_distance((x, y) in pair_of_words(40)) {
        prop_assert_eq!(
            pair_distance(&x, &y).unwrap(),
            pair_distance(&x.complement(), &y.complement()).unwrap()
        );
        prop_assert_eq!(
            pair_distance(&x, &y).unwrap(),
            pair_distance(&x.rotate_forward(), &y.rotate_forward()).unwrap()
        );
    }

    #[test]
    fn hamming_sandwich((x, y) in pair_of_words(40)) {
        let dh = hamming_distance(&x, &y).unwrap();
        let dp = pair_distance(&x, &y).unwrap();
        if dh == 0 || dh == x.len() {
            prop_assert_eq!(dp, dh);
        } else {
            prop_assert!(dh < dp && dp <= 2 * dh);
        }
    }

    #[test]
    fn concatenation_within_one(
        (u1, v1) in pair_of_words(20),
        (u2, v2) in pair_of_words(20),
    ) {
        let whole = pair_distance(&u1.concat(&u2), &v1.concat(&v2)).unwrap() as i64;
        let parts = (pair_distance(&u1, &v1).unwrap() + pair_distance(&u2, &v2).unwrap()) as i64;
        prop_assert!((whole - parts).abs() <= 1);
    }

    #[test]
    fn pair_read_round_trip(x in (1usize..=64).prop_flat_map(word_of)) {
        let y = pair_read(&x);
        prop_assert!(is_consistent(&y));
        prop_assert_eq!(extract_word(&y).unwrap(), x);
    }

    #[test]
    fn ball_grows_with_radius(n in 1u64..200, t in 0u64..200) {
        let t = t.min(n);
        let b = ball_size(n, t).unwrap();
        if t < n {
            prop_assert!(ball_size(n, t + 1).unwrap() >= b);
        } else {
            prop_assert_eq!(b, num_bigint::BigUint::from(1u8) << n);
        }
    }

    #[test]
    fn ball_translation_invariant(x in (1usize..=10).prop_flat_map(word_of), t in 0u64..10) {
        let t = t.min(x.len() as u64);
        let around = enumerate_pair_ball(&x, t).unwrap().len();
        prop_assert_eq!(
            num_bigint::BigUint::from(around),
            ball_size(x.len() as u64, t).unwrap()
        );
    }

    #[test]
    fn smod_range(a in 1u64..10_000, b in 1u64..100) {
        let s = smod(a, b);
        prop_assert!(1 <= s && s <= b);
        prop_assert_eq!(s % b, a % b);
    }

    #[test]
    fn channel_injects_exactly_t(x in (2usize..=30).prop_flat_map(word_of), t in 0usize..30, seed: u64) {
        let t = t.min(x.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = transmit_with(&x, t, ErrorMode::Exactly, &mut rng);
        prop_assert_eq!(pair_distance_raw(&pair_read(&x), &y).unwrap(), t);
        let y = transmit_with(&x, t, ErrorMode::UpTo, &mut rng);
        prop_assert!(pair_distance_raw(&pair_read(&x), &y).unwrap() <= t);
    }

    #[test]
    fn encoder_is_systematic(k in 2usize..=12, t in 1u32..=3, u: u64) {
        let f = pair_weight_fn(k).unwrap();
        let enc = encode_pair_weight(k, t, None).unwrap();
        let msg = BinaryWord::from_u64(u & mask(k), k).unwrap();
        let c = enc.encode(&msg, &f).unwrap();
        prop_assert_eq!(c.len(), k + enc.r);
        prop_assert_eq!(c.slice(0, k).unwrap(), msg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_length_sandwich(d in small_matrix()) {
        let exact = exact_np(&d, Metric::Pair, 16).unwrap();
        prop_assert!(plotkin_lower_bound(&d).ceiling <= exact.value as u64);
        let gv = gv_upper_bound(&d, &default_order(&d), Metric::Pair).unwrap();
        prop_assert!(exact.value as u64 <= gv);
        if !d.is_zero() {
            prop_assert!(exact.witness.verify(&d).unwrap());
        }
    }

    #[test]
    fn exact_length_ignores_order(d in small_matrix(), rot in 0usize..4) {
        let m = d.size();
        let perm: Vec<usize> = (0..m).map(|i| (i + rot) % m).collect();
        let a = exact_np(&d, Metric::Pair, 16).unwrap().value;
        let b = exact_np(&d.permuted(&perm).unwrap(), Metric::Pair, 16).unwrap().value;
        prop_assert_eq!(a, b);
    }
}
