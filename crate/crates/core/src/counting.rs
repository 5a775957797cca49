//! Exact pair-ball counting and the classical symbol-pair size bounds.
//!
//! Counts are arbitrary precision throughout; `B(n, t)` leaves the `u64`
//! range already for moderate `n`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pairmetric::{pair_distance_u64, BinaryWord};

/// Largest word length [`enumerate_pair_ball`] will scan.
pub const MAX_ENUMERATION_LENGTH: usize = 22;

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// `D(n, l, L)`: cyclic words of length `n`, Hamming weight `l` and `L` runs
/// of ones, `n·C(l−1, L−1)·C(n−l−1, L−1) / L`.
pub fn runs_count(n: u64, l: u64, runs: u64) -> Result<BigUint> {
    if !(n > l && l >= runs && runs >= 1) {
        return Err(Error::Domain(format!(
            "runs_count needs n > l >= L >= 1, got n={n}, l={l}, L={runs}"
        )));
    }
    let numerator = BigUint::from(n) * binomial(l - 1, runs - 1) * binomial(n - l - 1, runs - 1);
    let (q, rem) = numerator.div_rem(&BigUint::from(runs));
    assert!(rem.is_zero(), "D({n},{l},{runs}) is not integral");
    Ok(q)
}

/// `S(n, i)`: number of words at pair distance exactly `i` from any fixed
/// word of length `n`.
///
/// A word of weight `l < n` with `L` cyclic runs sits at pair distance
/// `l + L` from the center; the complement of the center (weight `n`) sits
/// at distance `n` and is added separately.
pub fn sphere_surface(n: u64, i: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("sphere_surface needs n >= 1".into()));
    }
    if i == 0 {
        return Ok(BigUint::one());
    }
    if n == 1 {
        return Ok(if i == 1 { BigUint::one() } else { BigUint::zero() });
    }
    let mut total = BigUint::zero();
    for l in i.div_ceil(2)..i {
        let runs = i - l;
        if l >= n || runs > n - l {
            continue;
        }
        total += runs_count(n, l, runs)?;
    }
    if i == n {
        total += 1u32;
    }
    Ok(total)
}

/// `B(n, t) = 1 + Σ_{i=1}^{t} S(n, i)`.
pub fn ball_size(n: u64, t: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::Domain("ball_size needs n >= 1".into()));
    }
    let mut total = BigUint::one();
    for i in 1..=t.min(n) {
        total += sphere_surface(n, i)?;
    }
    Ok(total)
}

/// `B(n, radius)` with the convention that a negative radius is the empty
/// ball.
pub fn ball_size_signed(n: u64, radius: i64) -> BigUint {
    if radius < 0 {
        BigUint::zero()
    } else {
        ball_size(n, radius as u64).expect("n >= 1")
    }
}

/// Hamming ball volume `Σ_{i<=t} C(n, i)`; negative radius is empty.
pub fn hamming_ball_size(n: u64, radius: i64) -> BigUint {
    if radius < 0 {
        return BigUint::zero();
    }
    (0..=(radius as u64).min(n)).map(|i| binomial(n, i)).sum()
}

/// Brute-force `{ y : d_p(x, y) <= t }` by scanning all `2^n` words.
pub fn enumerate_pair_ball(x: &BinaryWord, t: u64) -> Result<Vec<BinaryWord>> {
    let n = x.len();
    if n > MAX_ENUMERATION_LENGTH {
        return Err(Error::TooLarge {
            what: "word length",
            value: n,
            limit: MAX_ENUMERATION_LENGTH,
        });
    }
    let center = x.as_u64().expect("n <= 22");
    Ok((0..1u64 << n)
        .filter(|&y| u64::from(pair_distance_u64(center, y, n as u32)) <= t)
        .map(|y| BinaryWord::from_u64(y, n).expect("fits"))
        .collect())
}

/// Sphere-packing bound `⌊2^n / B(n, t)⌋` on the size of a code correcting
/// `t` pair errors.
pub fn sphere_packing_max(n: u64, t: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Domain("sphere_packing_max needs n >= 2".into()));
    }
    Ok((BigUint::one() << n) / ball_size(n, t)?)
}

/// Singleton bound `2^{n − d_p + 2}` for a code of minimum pair distance
/// `d_p`.
pub fn singleton_pair_max(n: u64, d_p: u64) -> Result<BigUint> {
    if n < 2 || d_p < 2 || d_p > n {
        return Err(Error::Domain(format!(
            "singleton_pair_max needs n >= 2 and 2 <= d_p <= n, got n={n}, d_p={d_p}"
        )));
    }
    Ok(BigUint::one() << (n - d_p + 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// Count words of length `n`, weight `l`, with `runs` cyclic runs of ones.
    fn runs_oracle(n: u32, l: u32, runs: u32) -> u64 {
        (0..1u64 << n)
            .filter(|&x| x.count_ones() == l)
            .filter(|&x| {
                // a run starts where a one follows a zero cyclically
                let prev = crate::pairmetric::rotl_u64(x, n);
                // prev has bit i = x_{i+1}; starts are x_i = 0, x_{i+1} = 1
                (!x & prev & ((1u64 << n) - 1)).count_ones() == runs
            })
            .count() as u64
    }

    #[test]
    fn runs_count_examples() {
        for n in 2..10 {
            assert_eq!(runs_count(n, 1, 1).unwrap(), big(n));
        }
        assert_eq!(runs_count(5, 2, 2).unwrap(), big(5));
        assert_eq!(runs_count(6, 3, 1).unwrap(), big(6));
        assert!(runs_count(5, 5, 1).is_err());
        assert!(runs_count(5, 1, 2).is_err());
    }

    #[test]
    fn runs_count_matches_enumeration() {
        for n in 2..=12u32 {
            for l in 1..n {
                for runs in 1..=l {
                    assert_eq!(
                        runs_count(n as u64, l as u64, runs as u64).unwrap(),
                        big(runs_oracle(n, l, runs)),
                        "D({n},{l},{runs})"
                    );
                }
            }
        }
    }

    #[test]
    fn surface_and_ball_examples() {
        for n in 2..10 {
            assert_eq!(sphere_surface(n, 1).unwrap(), big(0));
            assert_eq!(ball_size(n, 0).unwrap(), big(1));
            assert_eq!(ball_size(n, 1).unwrap(), big(1));
        }
        assert_eq!(sphere_surface(5, 2).unwrap(), big(5));
        assert_eq!(sphere_surface(5, 3).unwrap(), big(5));
        assert_eq!(ball_size(5, 2).unwrap(), big(6));
        assert_eq!(ball_size(5, 3).unwrap(), big(11));
        assert_eq!(ball_size(5, 4).unwrap(), big(21));
        assert_eq!(ball_size(1, 0).unwrap(), big(1));
        assert_eq!(ball_size(1, 1).unwrap(), big(2));
        assert!(ball_size(0, 1).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let zero3 = BinaryWord::zeros(3).unwrap();
        let mut ball: Vec<String> = enumerate_pair_ball(&zero3, 2)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        ball.sort();
        assert_eq!(ball, ["000", "001", "010", "100"]);
        let x: BinaryWord = "10110".parse().unwrap();
        assert_eq!(enumerate_pair_ball(&x, 0).unwrap(), vec![x.clone()]);
        let zero5 = BinaryWord::zeros(5).unwrap();
        assert_eq!(enumerate_pair_ball(&zero5, 2).unwrap().len(), 6);
        assert!(enumerate_pair_ball(&BinaryWord::zeros(23).unwrap(), 1).is_err());
    }

    #[test]
    fn ball_matches_oracle_small() {
        for n in 1..=10u64 {
            let x = BinaryWord::zeros(n as usize).unwrap();
            for t in 0..=n + 1 {
                let oracle = enumerate_pair_ball(&x, t).unwrap().len() as u64;
                assert_eq!(ball_size(n, t).unwrap(), big(oracle), "B({n},{t})");
            }
            assert_eq!(ball_size(n, n).unwrap(), BigUint::one() << n);
        }
    }

    #[test]
    fn packing_and_singleton() {
        assert_eq!(sphere_packing_max(5, 1).unwrap(), big(32));
        assert_eq!(sphere_packing_max(5, 2).unwrap(), big(5));
        assert_eq!(singleton_pair_max(7, 6).unwrap(), big(8));
        assert!(singleton_pair_max(7, 8).is_err());
        assert!(singleton_pair_max(7, 1).is_err());
    }

    #[test]
    fn large_n_is_exact() {
        // B(100, 4) = 1 + S(100,2) + S(100,3) + S(100,4)
        //           = 1 + 100 + 100 + (100 + D(100,2,2))
        let d = runs_count(100, 2, 2).unwrap();
        assert_eq!(d, big(100 * 97 / 2));
        assert_eq!(ball_size(100, 4).unwrap(), big(301) + d);
        assert_eq!(ball_size(200, 200).unwrap(), BigUint::one() << 200u32);
        assert!(ball_size(400, 60).unwrap() > BigUint::from(u128::MAX));
    }

    #[test]
    fn hamming_ball() {
        assert_eq!(hamming_ball_size(5, -1), big(0));
        assert_eq!(hamming_ball_size(5, 1), big(6));
        assert_eq!(hamming_ball_size(5, 9), big(32));
    }
}
