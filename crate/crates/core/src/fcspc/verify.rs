use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::encoder::{Family, PairEncoder, ParityRule};
use super::function::FunctionTable;
use crate::error::{Error, Result};
use crate::irregular::{solve, Certificate, Constraints};
use crate::pairmetric::{concat_u64, pair_distance_u64, BinaryWord};

/// Exhaustive verification checks all message pairs up to this length.
pub const MAX_EXHAUSTIVE_LENGTH: usize = 14;
/// Exact redundancy search handles at most `2^5` messages.
pub const MAX_SEARCH_LENGTH: usize = 5;
/// and parities up to this length.
pub const MAX_SEARCH_REDUNDANCY: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// Two messages with different values encoded too close together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub u1: BinaryWord,
    pub u2: BinaryWord,
    pub f1: i64,
    pub f2: i64,
    pub distance: u32,
    pub required: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    /// Every pair with different values was checked.
    Valid { pairs: u64 },
    /// Sampling found nothing; this is not a proof of validity.
    NoViolationFound { samples: u64 },
    Violated { counterexample: Counterexample },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Violated { counterexample } => Some(counterexample),
            _ => None,
        }
    }
}

/// Checks `d_p(Enc(u1), Enc(u2)) >= 2t + 1` whenever `f(u1) != f(u2)`.
pub fn verify_fcspc(enc: &PairEncoder, f: &FunctionTable, t: u32, mode: VerifyMode) -> Result<Verdict> {
    match mode {
        VerifyMode::Exhaustive => verify_exhaustive(enc, f, t),
        VerifyMode::Sampled { samples, seed } => verify_sampled(enc, f, t, samples, seed),
    }
}

fn counterexample(f: &FunctionTable, a: u64, b: u64, distance: u32, t: u32) -> Counterexample {
    Counterexample {
        u1: f.message(a),
        u2: f.message(b),
        f1: f.eval(a),
        f2: f.eval(b),
        distance,
        required: 2 * t + 1,
    }
}

fn verify_exhaustive(enc: &PairEncoder, f: &FunctionTable, t: u32) -> Result<Verdict> {
    if f.k() > MAX_EXHAUSTIVE_LENGTH {
        return Err(Error::TooLarge {
            what: "message length for exhaustive verification",
            value: f.k(),
            limit: MAX_EXHAUSTIVE_LENGTH,
        });
    }
    let words = enc.codewords(f)?;
    let n = enc.codeword_length() as u32;
    let need = 2 * t + 1;
    let groups = f.preimages();
    // each unordered pair once: u1 against every class above its own
    let found = (0..f.messages()).into_par_iter().find_map_first(|a| {
        let ca = f.class(a);
        groups[ca + 1..].iter().flatten().find_map(|&b| {
            let d = pair_distance_u64(words[a as usize], words[b as usize], n);
            (d < need).then_some((a, b, d))
        })
    });
    if let Some((a, b, d)) = found {
        return Ok(Verdict::Violated {
            counterexample: counterexample(f, a, b, d, t),
        });
    }
    let sizes: Vec<u64> = groups.iter().map(|g| g.len() as u64).collect();
    let total: u64 = sizes.iter().sum();
    let same: u64 = sizes.iter().map(|s| s * s).sum();
    Ok(Verdict::Valid {
        pairs: (total * total - same) / 2,
    })
}

fn verify_sampled(enc: &PairEncoder, f: &FunctionTable, t: u32, samples: u64, seed: u64) -> Result<Verdict> {
    enc.check_against(f)?;
    let n = enc.codeword_length() as u32;
    let need = 2 * t + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let messages = f.messages();
    for _ in 0..samples {
        let a = rng.gen_range(0..messages);
        // close pairs are the likely violations; draw offsets of low weight
        let flips = rng.gen_range(1..=(need as usize).min(f.k()));
        let mut b = a;
        for _ in 0..flips {
            b ^= 1 << rng.gen_range(0..f.k());
        }
        if b == a || f.class(a) == f.class(b) {
            continue;
        }
        let d = pair_distance_u64(enc.codeword_u64(a, f)?, enc.codeword_u64(b, f)?, n);
        if d < need {
            return Ok(Verdict::Violated {
                counterexample: counterexample(f, a.min(b), a.max(b), d, t),
            });
        }
    }
    Ok(Verdict::NoViolationFound { samples })
}

/// Smallest redundancy of any FCSPC for `f`, with a per-message witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRedundancy {
    pub value: usize,
    pub encoder: PairEncoder,
    pub certificate: Certificate,
}

struct RedundancyProblem<'a> {
    f: &'a FunctionTable,
    k: u32,
    r: u32,
    need: u32,
}

impl Constraints for RedundancyProblem<'_> {
    fn vars(&self) -> usize {
        self.f.messages() as usize
    }

    fn width(&self) -> u32 {
        self.r
    }

    fn linked(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i as u64, j as u64);
        // appending parities lowers the pair distance by at most one
        self.f.class(a) != self.f.class(b) && pair_distance_u64(a, b, self.k) < self.need + 1
    }

    fn compatible(&self, i: usize, wi: u64, j: usize, wj: u64) -> bool {
        let n = self.k + self.r;
        let x = concat_u64(i as u64, wi, self.r);
        let y = concat_u64(j as u64, wj, self.r);
        pair_distance_u64(x, y, n) >= self.need
    }
}

fn satisfied_without_parity(f: &FunctionTable, need: u32) -> bool {
    let k = f.k() as u32;
    (0..f.messages()).all(|a| {
        (a + 1..f.messages()).all(|b| f.class(a) == f.class(b) || pair_distance_u64(a, b, k) >= need)
    })
}

/// Exact `r_p^f(k, t)` by exhaustive search over per-message parities.
///
/// Parities may be shifted by a common word without changing any distance,
/// so the first message's parity is fixed to zero.
pub fn exact_redundancy(f: &FunctionTable, t: u32, r_max: usize) -> Result<ExactRedundancy> {
    if f.k() > MAX_SEARCH_LENGTH {
        return Err(Error::TooLarge {
            what: "message length for exact redundancy",
            value: f.k(),
            limit: MAX_SEARCH_LENGTH,
        });
    }
    if r_max > MAX_SEARCH_REDUNDANCY {
        return Err(Error::TooLarge {
            what: "r_max",
            value: r_max,
            limit: MAX_SEARCH_REDUNDANCY,
        });
    }
    let need = 2 * t + 1;
    let empty = PairEncoder {
        k: f.k(),
        r: 0,
        t,
        family: Family::Exact,
        function: f.spec().clone(),
        rule: ParityRule::Empty,
    };
    if satisfied_without_parity(f, need) {
        return Ok(ExactRedundancy {
            value: 0,
            encoder: empty,
            certificate: Certificate::NoConstraints,
        });
    }
    let mut certificate = Certificate::PositiveEntry;
    for r in 1..=r_max {
        let problem = RedundancyProblem {
            f,
            k: f.k() as u32,
            r: r as u32,
            need,
        };
        let outcome = solve(&problem);
        match outcome.assignment {
            Some(parities) => {
                let parities = parities
                    .into_iter()
                    .map(|p| BinaryWord::from_u64(p, r).expect("fits"))
                    .collect();
                return Ok(ExactRedundancy {
                    value: r,
                    encoder: PairEncoder {
                        r,
                        rule: ParityRule::Table { parities },
                        ..empty
                    },
                    certificate,
                });
            }
            None => {
                certificate = Certificate::Exhaustive {
                    length: r,
                    nodes: outcome.nodes,
                }
            }
        }
    }
    Err(Error::Exhausted { r_max })
}

#[cfg(test)]
mod tests {
    use super::super::encoder::{encode_pair_weight, encode_weight_distribution};
    use super::super::function::{pair_weight_fn, weight_distribution_fn, FunctionSpec};
    use super::*;

    /// Every ordered pair, no grouping.
    fn oracle_valid(enc: &PairEncoder, f: &FunctionTable, t: u32) -> bool {
        let n = enc.codeword_length() as u32;
        (0..f.messages()).all(|a| {
            (0..f.messages()).all(|b| {
                f.eval(a) == f.eval(b)
                    || pair_distance_u64(
                        enc.codeword_u64(a, f).unwrap(),
                        enc.codeword_u64(b, f).unwrap(),
                        n,
                    ) > 2 * t
            })
        })
    }

    #[test]
    fn constant_function_needs_no_parity() {
        let f = FunctionTable::from_fn(4, FunctionSpec::Custom, |_| 1).unwrap();
        let enc = PairEncoder {
            k: 4,
            r: 0,
            t: 2,
            family: Family::Class,
            function: FunctionSpec::Custom,
            rule: ParityRule::Empty,
        };
        let v = verify_fcspc(&enc, &f, 2, VerifyMode::Exhaustive).unwrap();
        assert_eq!(v, Verdict::Valid { pairs: 0 });
        assert_eq!(exact_redundancy(&f, 2, 4).unwrap().value, 0);
    }

    #[test]
    fn weight_encoder_k8_t2() {
        let f = pair_weight_fn(8).unwrap();
        let enc = encode_pair_weight(8, 2, None).unwrap();
        assert!(verify_fcspc(&enc, &f, 2, VerifyMode::Exhaustive).unwrap().is_valid());
        assert!(oracle_valid(&enc, &f, 2));
    }

    #[test]
    fn tampered_encoder_is_caught() {
        let f = pair_weight_fn(6).unwrap();
        let mut enc = encode_pair_weight(6, 2, None).unwrap();
        if let ParityRule::WeightCycle { words } = &mut enc.rule {
            words[1] = words[0].clone();
        }
        let v = verify_fcspc(&enc, &f, 2, VerifyMode::Exhaustive).unwrap();
        let c = v.counterexample().expect("violation");
        assert!(c.distance < 5);
        assert_ne!(c.f1, c.f2);
        assert!(!oracle_valid(&enc, &f, 2));
        let sampled = verify_fcspc(&enc, &f, 2, VerifyMode::Sampled { samples: 5000, seed: 1 }).unwrap();
        assert!(sampled.counterexample().is_some());
    }

    #[test]
    fn sampled_mode_never_claims_validity() {
        let f = weight_distribution_fn(9, 5).unwrap();
        let enc = encode_weight_distribution(9, 2, 5).unwrap();
        let v = verify_fcspc(&enc, &f, 2, VerifyMode::Sampled { samples: 200, seed: 3 }).unwrap();
        assert_eq!(v, Verdict::NoViolationFound { samples: 200 });
    }

    #[test]
    fn guard() {
        let f = pair_weight_fn(15).unwrap();
        let enc = encode_pair_weight(15, 1, None).unwrap();
        assert!(matches!(
            verify_fcspc(&enc, &f, 1, VerifyMode::Exhaustive),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn exact_redundancy_small() {
        for k in 2..=4 {
            let f = pair_weight_fn(k).unwrap();
            let res = exact_redundancy(&f, 1, 6).unwrap();
            assert!(res.value <= 2);
            assert!(res.value >= 1);
            let v = verify_fcspc(&res.encoder, &f, 1, VerifyMode::Exhaustive).unwrap();
            assert!(v.is_valid());
            assert!(oracle_valid(&res.encoder, &f, 1));
        }
    }
}
