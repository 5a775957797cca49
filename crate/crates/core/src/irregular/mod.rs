//! Irregular-distance codes: a code `{p_1, …, p_M}` of length `r` is a
//! `D`-code when `dist(p_i, p_j) >= D[i][j]` for every pair. `N_p(D)` is the
//! smallest such `r` in the pair metric, `N(D)` in the Hamming metric.

mod matrix;
mod search;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{ball_size_signed, hamming_ball_size};
use crate::error::{Error, Result};
use crate::pairmetric::{BinaryWord, Metric};

pub use matrix::DistanceMatrix;
pub(crate) use search::{solve, Constraints};

/// Exact search handles at most this many codewords.
pub const MAX_EXACT_CODEWORDS: usize = 8;
/// Exact search handles codeword lengths up to this value.
pub const MAX_EXACT_LENGTH: usize = 22;
/// Greedy construction scans all `2^r` candidates up to this length.
pub const MAX_GREEDY_LENGTH: usize = 26;

/// A code together with the matrix order it was built for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeWitness {
    pub metric: Metric,
    pub length: usize,
    pub words: Vec<BinaryWord>,
}

impl CodeWitness {
    pub fn verify(&self, d: &DistanceMatrix) -> Result<bool> {
        if self.words.is_empty() {
            return Ok(d.is_zero());
        }
        verify_irregular(&self.words, d, self.metric)
    }

    fn from_u64s(words: &[u64], length: usize, metric: Metric) -> Self {
        Self {
            metric,
            length,
            words: words
                .iter()
                .map(|&w| BinaryWord::from_u64(w, length).expect("fits"))
                .collect(),
        }
    }
}

/// True iff `words[i]` and `words[j]` are at distance at least `D[i][j]`
/// for every `i, j`, in the order given.
pub fn verify_irregular(words: &[BinaryWord], d: &DistanceMatrix, metric: Metric) -> Result<bool> {
    if words.len() != d.size() {
        return Err(Error::SizeMismatch {
            expected: d.size(),
            actual: words.len(),
        });
    }
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if metric.distance(&words[i], &words[j])? < d.get(i, j) as usize {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Plotkin-type lower bound on `N_p(D)`, both as the exact rational and its
/// ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlotkinBound {
    pub rational: Ratio<u64>,
    pub ceiling: u64,
}

impl Serialize for PlotkinBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PlotkinBound", 3)?;
        st.serialize_field("numerator", self.rational.numer())?;
        st.serialize_field("denominator", self.rational.denom())?;
        st.serialize_field("ceiling", &self.ceiling)?;
        st.end()
    }
}

/// Lower bound from column-wise pair-symbol counting:
/// `c_M · Σ_{i<j} D[i][j]` with `c_M = 8/(3(M²−1))` for odd `M`,
/// `8/(3M²)` for `M ≡ 0 (mod 4)` and `8/(3M²−4)` for `M ≡ 2 (mod 4)`.
pub fn plotkin_lower_bound(d: &DistanceMatrix) -> PlotkinBound {
    let m = d.size() as u64;
    let sum = d.upper_sum();
    if m < 2 || sum == 0 {
        return PlotkinBound {
            rational: Ratio::from_integer(0),
            ceiling: 0,
        };
    }
    let denom = match m % 4 {
        0 => 3 * m * m,
        2 => 3 * m * m - 4,
        _ => 3 * (m * m - 1),
    };
    let rational = Ratio::new(8 * sum, denom);
    PlotkinBound {
        rational,
        ceiling: rational.ceil().to_integer(),
    }
}

/// Matrix indices sorted by descending row sum (ties by index).
pub fn default_order(d: &DistanceMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.size()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(d.row_sum(i)));
    order
}

pub fn identity_order(d: &DistanceMatrix) -> Vec<usize> {
    (0..d.size()).collect()
}

fn ball(metric: Metric, r: u64, radius: i64) -> BigUint {
    match metric {
        Metric::Pair => ball_size_signed(r, radius),
        Metric::Hamming => hamming_ball_size(r, radius),
    }
}

/// Smallest `r` with `2^r > max_j Σ_{i<j} B(r, D[π(i)][π(j)] − 1)`, the
/// length at which greedy selection in order `π` can never get stuck.
pub fn gv_upper_bound(d: &DistanceMatrix, order: &[usize], metric: Metric) -> Result<u64> {
    matrix::check_permutation(order, d.size())?;
    if d.is_zero() {
        return Ok(0);
    }
    let mut r = 1u64;
    loop {
        let worst = (0..order.len())
            .map(|j| {
                (0..j)
                    .map(|i| ball(metric, r, i64::from(d.get(order[i], order[j])) - 1))
                    .sum::<BigUint>()
            })
            .max()
            .unwrap_or_default();
        if (BigUint::from(1u32) << r) > worst {
            return Ok(r);
        }
        r += 1;
    }
}

/// Picks codewords one at a time in `order`; each is the first word, scanning
/// upwards from a seed-derived offset, that meets every constraint against
/// the words already chosen. The witness is returned in matrix order.
pub fn greedy_construct(
    d: &DistanceMatrix,
    r: usize,
    order: &[usize],
    metric: Metric,
    seed: u64,
) -> Result<CodeWitness> {
    matrix::check_permutation(order, d.size())?;
    if r == 0 {
        return Err(Error::Domain("greedy_construct needs r >= 1".into()));
    }
    if r > MAX_GREEDY_LENGTH {
        return Err(Error::TooLarge {
            what: "code length",
            value: r,
            limit: MAX_GREEDY_LENGTH,
        });
    }
    let space = 1u64 << r;
    let offset = ChaCha8Rng::seed_from_u64(seed).gen_range(0..space);
    let n = r as u32;
    let mut chosen: Vec<(usize, u64)> = Vec::with_capacity(order.len());
    for &j in order {
        let word = (0..space)
            .map(|c| (offset + c) % space)
            .find(|&w| {
                chosen
                    .iter()
                    .all(|&(i, p)| metric.distance_u64(p, w, n) >= d.get(i, j))
            })
            .ok_or(Error::Infeasible { length: r })?;
        chosen.push((j, word));
    }
    chosen.sort_by_key(|&(i, _)| i);
    let words: Vec<u64> = chosen.into_iter().map(|(_, w)| w).collect();
    Ok(CodeWitness::from_u64s(&words, r, metric))
}

/// Why no shorter code exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// No positive constraint; the empty code of length 0 works.
    NoConstraints,
    /// Some entry is positive, so length 0 cannot work.
    PositiveEntry,
    /// A completed exhaustive search found no code of this length.
    Exhaustive { length: usize, nodes: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpResult {
    pub value: usize,
    pub witness: CodeWitness,
    pub certificate: Certificate,
}

struct IrregularProblem<'a> {
    d: &'a DistanceMatrix,
    metric: Metric,
    width: u32,
}

impl Constraints for IrregularProblem<'_> {
    fn vars(&self) -> usize {
        self.d.size()
    }

    fn width(&self) -> u32 {
        self.width
    }

    fn linked(&self, i: usize, j: usize) -> bool {
        self.d.get(i, j) > 0
    }

    fn compatible(&self, i: usize, wi: u64, j: usize, wj: u64) -> bool {
        self.metric.distance_u64(wi, wj, self.width) >= self.d.get(i, j)
    }

    fn canonical(&self, w: u64) -> Option<bool> {
        Some(match self.metric {
            Metric::Pair => search::dihedral_min(w, self.width) == w,
            // any coordinate permutation fixes zero, so only the weight matters
            Metric::Hamming => w == (1u64 << w.count_ones()) - 1,
        })
    }
}

/// Searches for a `D`-code of exactly length `r`.
pub fn find_code(d: &DistanceMatrix, metric: Metric, r: usize) -> Result<Option<CodeWitness>> {
    Ok(search_length(d, metric, r)?.0)
}

fn search_length(d: &DistanceMatrix, metric: Metric, r: usize) -> Result<(Option<CodeWitness>, u64)> {
    if r == 0 || r > MAX_EXACT_LENGTH {
        return Err(Error::TooLarge {
            what: "code length",
            value: r,
            limit: MAX_EXACT_LENGTH,
        });
    }
    let problem = IrregularProblem {
        d,
        metric,
        width: r as u32,
    };
    let outcome = solve(&problem);
    Ok((
        outcome
            .assignment
            .map(|w| CodeWitness::from_u64s(&w, r, metric)),
        outcome.nodes,
    ))
}

/// Exact `N_p(D)` (or `N(D)` for the Hamming metric) by exhaustive search
/// over increasing lengths.
pub fn exact_np(d: &DistanceMatrix, metric: Metric, r_max: usize) -> Result<NpResult> {
    if d.size() > MAX_EXACT_CODEWORDS {
        return Err(Error::TooLarge {
            what: "codeword count",
            value: d.size(),
            limit: MAX_EXACT_CODEWORDS,
        });
    }
    if r_max > MAX_EXACT_LENGTH {
        return Err(Error::TooLarge {
            what: "r_max",
            value: r_max,
            limit: MAX_EXACT_LENGTH,
        });
    }
    if d.is_zero() {
        return Ok(NpResult {
            value: 0,
            witness: CodeWitness {
                metric,
                length: 0,
                words: Vec::new(),
            },
            certificate: Certificate::NoConstraints,
        });
    }
    // the Plotkin value itself may be feasible, one below never is; starting
    // there makes every certificate an exhaustive one
    let lower = match metric {
        Metric::Pair => plotkin_lower_bound(d).ceiling as usize,
        Metric::Hamming => 1,
    };
    let mut certificate = Certificate::PositiveEntry;
    for r in lower.saturating_sub(1).max(1)..=r_max {
        let (found, nodes) = search_length(d, metric, r)?;
        match found {
            Some(witness) => {
                return Ok(NpResult {
                    value: r,
                    witness,
                    certificate,
                })
            }
            None => certificate = Certificate::Exhaustive { length: r, nodes },
        }
    }
    Err(Error::Exhausted { r_max })
}

/// Sylvester Hadamard code of order `2^a`: the rows of `H` and `−H` with
/// `+1 → 0`, `−1 → 1`. `2^{a+1}` words of length `2^a`.
pub fn hadamard_code(a: u32) -> Result<Vec<BinaryWord>> {
    if !(1..=12).contains(&a) {
        return Err(Error::Domain(format!("hadamard_code needs 1 <= a <= 12, got {a}")));
    }
    let n = 1usize << a;
    let rows: Vec<BinaryWord> = (0..n)
        .map(|i| {
            BinaryWord::from_bits((0..n).map(|j| (i & j).count_ones() % 2 == 1)).expect("n >= 2")
        })
        .collect();
    let complements: Vec<BinaryWord> = rows.iter().map(BinaryWord::complement).collect();
    Ok(rows.into_iter().chain(complements).collect())
}

/// Closed-form upper bound on `N_p(M, D)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UniformUpper {
    /// `2D − 2` from a Sylvester Hadamard code of that order.
    Hadamard { order: u64, value: u64 },
    /// `(2D − 4) / (1 − 2√(ln(D−1)/(D−1)))` and its ceiling.
    Asymptotic { exact: f64, value: u64 },
    Unavailable,
}

impl UniformUpper {
    pub fn value(&self) -> Option<u64> {
        match self {
            UniformUpper::Hadamard { value, .. } | UniformUpper::Asymptotic { value, .. } => {
                Some(*value)
            }
            UniformUpper::Unavailable => None,
        }
    }
}

/// `(2D − 4) / (1 − 2√(ln(D−1)/(D−1)))`.
pub fn asymptotic_uniform_bound(d: u64) -> f64 {
    let x = (d - 1) as f64;
    (2.0 * d as f64 - 4.0) / (1.0 - 2.0 * (x.ln() / x).sqrt())
}

pub fn np_uniform_upper(m: u64, d: u64) -> UniformUpper {
    if m < 2 || d < 2 {
        return UniformUpper::Unavailable;
    }
    let order = 2 * d - 2;
    if order.is_power_of_two() && m <= 4 * d - 4 {
        return UniformUpper::Hadamard {
            order,
            value: order,
        };
    }
    if d >= 11 && m <= (d - 1) * (d - 1) {
        let exact = asymptotic_uniform_bound(d);
        return UniformUpper::Asymptotic {
            exact,
            value: exact.ceil() as u64,
        };
    }
    UniformUpper::Unavailable
}

/// `(M, max entry)`: any bound on `N_p(M, D_max)` bounds `N_p(D)` too.
pub fn dmax_uniform_relax(d: &DistanceMatrix) -> (usize, u32) {
    (d.size(), d.max_entry())
}

/// Exact comparison of `N_p(M, D)` against `N(M, D − 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HammingComparison {
    pub m: usize,
    pub d: u32,
    pub pair: usize,
    pub hamming: usize,
    /// `None` when `M = 2`, where the inequality is not claimed.
    pub holds: Option<bool>,
    pub note: String,
}

pub fn np_vs_hamming_check(m: usize, d: u32) -> Result<HammingComparison> {
    if m < 2 || d < 2 {
        return Err(Error::Domain(format!("needs M >= 2 and D >= 2, got M={m}, D={d}")));
    }
    let pair = exact_np(&DistanceMatrix::uniform(m, d), Metric::Pair, MAX_EXACT_LENGTH)?.value;
    let hamming = exact_np(
        &DistanceMatrix::uniform(m, d - 1),
        Metric::Hamming,
        MAX_EXACT_LENGTH,
    )?
    .value;
    let (holds, note) = if m == 2 {
        (
            None,
            "M = 2 is excluded: both words may be complements, where d_p = d_H".to_string(),
        )
    } else {
        let ok = pair <= hamming;
        (Some(ok), format!("N_p({m},{d}) = {pair} <= N({m},{}) = {hamming}: {ok}", d - 1))
    };
    Ok(HammingComparison {
        m,
        d,
        pair,
        hamming,
        holds,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(list: &[&str]) -> Vec<BinaryWord> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn verify_examples() {
        for t in 2..6 {
            let n = 2 * t - 2;
            let code = vec![BinaryWord::zeros(n).unwrap(), BinaryWord::ones(n).unwrap()];
            let d = DistanceMatrix::uniform(2, n as u32);
            assert!(verify_irregular(&code, &d, Metric::Pair).unwrap());
        }
        let code = words(&["00", "01", "11"]);
        assert!(verify_irregular(&code, &DistanceMatrix::uniform(3, 2), Metric::Pair).unwrap());
        assert!(!verify_irregular(&code, &DistanceMatrix::uniform(3, 2), Metric::Hamming).unwrap());
        assert!(verify_irregular(&code, &DistanceMatrix::zeros(3), Metric::Pair).unwrap());
        assert!(matches!(
            verify_irregular(&code, &DistanceMatrix::zeros(2), Metric::Pair),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn plotkin_examples() {
        assert_eq!(plotkin_lower_bound(&DistanceMatrix::zeros(4)).ceiling, 0);
        for m in [4usize, 8, 12] {
            for d in 1..6u32 {
                let expected = Ratio::new(4 * (m as u64 - 1) * u64::from(d), 3 * m as u64);
                let b = plotkin_lower_bound(&DistanceMatrix::uniform(m, d));
                assert_eq!(b.rational, expected);
                assert_eq!(b.ceiling, expected.ceil().to_integer());
            }
        }
        // M = 2 reduces to N_p >= D
        assert_eq!(plotkin_lower_bound(&DistanceMatrix::uniform(2, 7)).ceiling, 7);
        assert_eq!(plotkin_lower_bound(&DistanceMatrix::uniform(1, 7)).ceiling, 0);
    }

    #[test]
    fn gv_examples() {
        let d2 = DistanceMatrix::uniform(2, 2);
        assert_eq!(gv_upper_bound(&d2, &[0, 1], Metric::Pair).unwrap(), 2);
        assert_eq!(
            gv_upper_bound(&DistanceMatrix::zeros(3), &[0, 1, 2], Metric::Pair).unwrap(),
            0
        );
        for m in 2..6usize {
            for d in 2..6u32 {
                let mat = DistanceMatrix::uniform(m, d);
                let r = gv_upper_bound(&mat, &identity_order(&mat), Metric::Pair).unwrap();
                let holds = |r: u64| {
                    (BigUint::from(1u32) << r)
                        > BigUint::from(m as u64 - 1) * ball_size_signed(r, i64::from(d) - 1)
                };
                assert!(holds(r));
                assert!(!holds(r - 1));
            }
        }
        assert!(gv_upper_bound(&d2, &[0, 0], Metric::Pair).is_err());
    }

    #[test]
    fn greedy_examples() {
        let d2 = DistanceMatrix::uniform(2, 2);
        let w = greedy_construct(&d2, 2, &[0, 1], Metric::Pair, 7).unwrap();
        assert!(w.verify(&d2).unwrap());
        let single = DistanceMatrix::zeros(1);
        for r in 1..4 {
            let w = greedy_construct(&single, r, &[0], Metric::Pair, 1).unwrap();
            assert_eq!(w.words.len(), 1);
        }
        for t in 2..5usize {
            let n = 2 * t - 2;
            let d = DistanceMatrix::uniform(2, n as u32);
            let w = greedy_construct(&d, n, &[0, 1], Metric::Pair, 3).unwrap();
            assert!(w.verify(&d).unwrap());
            // every pair symbol differs, as between a word and its complement
            let dp = crate::pairmetric::pair_distance(&w.words[0], &w.words[1]).unwrap();
            assert_eq!(dp, n);
        }
        assert_eq!(
            greedy_construct(&d2, 1, &[0, 1], Metric::Pair, 0),
            Err(Error::Infeasible { length: 1 })
        );
        assert!(matches!(
            greedy_construct(&d2, 27, &[0, 1], Metric::Pair, 0),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn greedy_is_deterministic_per_seed() {
        let d = DistanceMatrix::uniform(4, 3);
        let a = greedy_construct(&d, 6, &[0, 1, 2, 3], Metric::Pair, 42).unwrap();
        let b = greedy_construct(&d, 6, &[0, 1, 2, 3], Metric::Pair, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exact_examples() {
        for d in 2..=6u32 {
            let res = exact_np(&DistanceMatrix::uniform(2, d), Metric::Pair, 22).unwrap();
            assert_eq!(res.value, d as usize);
            assert!(res.witness.verify(&DistanceMatrix::uniform(2, d)).unwrap());
        }
        let res = exact_np(&DistanceMatrix::uniform(3, 2), Metric::Pair, 22).unwrap();
        assert_eq!(res.value, 2);
        assert!(matches!(res.certificate, Certificate::Exhaustive { length: 1, .. }));
        let zero = exact_np(&DistanceMatrix::zeros(3), Metric::Pair, 22).unwrap();
        assert_eq!(zero.value, 0);
        assert_eq!(zero.certificate, Certificate::NoConstraints);
        assert!(matches!(
            exact_np(&DistanceMatrix::uniform(9, 1), Metric::Pair, 10),
            Err(Error::TooLarge { .. })
        ));
        assert_eq!(
            exact_np(&DistanceMatrix::uniform(2, 9), Metric::Pair, 5),
            Err(Error::Exhausted { r_max: 5 })
        );
    }

    #[test]
    fn exact_hamming() {
        // N(4, 1) = 2: four distinct words need two bits
        let res = exact_np(&DistanceMatrix::uniform(4, 1), Metric::Hamming, 22).unwrap();
        assert_eq!(res.value, 2);
        // N(2, D) = D
        let res = exact_np(&DistanceMatrix::uniform(2, 5), Metric::Hamming, 22).unwrap();
        assert_eq!(res.value, 5);
    }

    #[test]
    fn hadamard_examples() {
        let h1 = hadamard_code(1).unwrap();
        let names: Vec<String> = h1.iter().map(ToString::to_string).collect();
        assert_eq!(names, ["00", "01", "11", "10"]);
        for a in 1..=5u32 {
            let code = hadamard_code(a).unwrap();
            let n = 1usize << a;
            assert_eq!(code.len(), 2 * n);
            for i in 0..code.len() {
                for j in i + 1..code.len() {
                    let dh = crate::pairmetric::hamming_distance(&code[i], &code[j]).unwrap();
                    let expected = if j == i + n { n } else { n / 2 };
                    assert_eq!(dh, expected, "a={a} rows {i},{j}");
                }
            }
        }
        assert!(hadamard_code(0).is_err());
    }

    #[test]
    fn uniform_upper_examples() {
        assert_eq!(
            np_uniform_upper(4, 3),
            UniformUpper::Hadamard { order: 4, value: 4 }
        );
        assert_eq!(np_uniform_upper(2, 2).value(), Some(2));
        let expected = 18.0 / (1.0 - 2.0 * (10f64.ln() / 10.0).sqrt());
        match np_uniform_upper(100, 11) {
            UniformUpper::Asymptotic { exact, value } => {
                assert!((exact - expected).abs() < 1e-9);
                assert_eq!(value, expected.ceil() as u64);
            }
            other => panic!("unexpected {other:?}"),
        }
        // 2D − 2 = 6 is not a Sylvester order and D < 11
        assert_eq!(np_uniform_upper(3, 4), UniformUpper::Unavailable);
        // Hadamard order fine but too many codewords
        assert_eq!(np_uniform_upper(9, 3), UniformUpper::Unavailable);
    }

    #[test]
    fn hadamard_rows_witness_uniform_upper() {
        // first M rows of the order-(2D−2) code form an (M, D) pair code
        for a in 1..=3u32 {
            let n = 1usize << a;
            let d = n as u32 / 2 + 1;
            let code = hadamard_code(a).unwrap();
            for m in 3..=code.len() {
                let mat = DistanceMatrix::uniform(m, d);
                assert!(verify_irregular(&code[..m], &mat, Metric::Pair).unwrap());
            }
        }
    }

    #[test]
    fn relax() {
        assert_eq!(dmax_uniform_relax(&DistanceMatrix::zeros(5)), (5, 0));
        assert_eq!(dmax_uniform_relax(&DistanceMatrix::uniform(3, 4)), (3, 4));
    }

    #[test]
    fn hamming_comparison() {
        let c = np_vs_hamming_check(3, 3).unwrap();
        assert_eq!(c.holds, Some(true));
        let c = np_vs_hamming_check(2, 3).unwrap();
        assert_eq!(c.holds, None);
        assert_eq!((c.pair, c.hamming), (3, 2));
        let c = np_vs_hamming_check(4, 2).unwrap();
        assert_eq!((c.pair, c.hamming, c.holds), (2, 2, Some(true)));
    }
}
