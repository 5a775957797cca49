use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::function::{FunctionSpec, FunctionTable};
use super::matrices::{ball_maxima, build_function_matrix, wide_ball_witness, MatrixKind};
use super::smod;
use crate::error::{Error, Result};
use crate::irregular::{default_order, exact_np, greedy_construct, gv_upper_bound, MAX_EXACT_CODEWORDS};
use crate::pairmetric::{concat_u64, min_pair_distance, pair_weight_u64, BinaryWord, Metric};

/// Codewords `(u, p(u))` must fit in a machine word.
pub const MAX_CODEWORD_LENGTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Cyclic parity assignment by pair weight.
    Weight,
    /// Prefix-of-ones parities for the pair weight distribution.
    Dist,
    /// Repetition bit for pair-locally binary functions.
    Locally,
    /// One parity word per function value from a requirement-matrix code.
    Class,
    /// Per-message parities found by exhaustive search.
    Exact,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Weight => "weight",
            Family::Dist => "dist",
            Family::Locally => "locally",
            Family::Class => "class",
            Family::Exact => "exact",
        };
        f.write_str(s)
    }
}

/// How the parity word of a message is obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParityRule {
    /// No parity at all (`r = 0`).
    Empty,
    /// `words[((w_p(u) + 1) smod L) − 1]` with `L = words.len()`.
    WeightCycle { words: Vec<BinaryWord> },
    /// `parities[f(u)]`.
    ByValue {
        #[serde(with = "value_map")]
        parities: BTreeMap<i64, BinaryWord>,
    },
    /// `parities[u]`, indexed by message integer.
    Table { parities: Vec<BinaryWord> },
}

// integer map keys do not survive the tagged-enum round trip in JSON
mod value_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::pairmetric::BinaryWord;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        value: i64,
        parity: BinaryWord,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<i64, BinaryWord>, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(&value, parity)| Entry {
                value,
                parity: parity.clone(),
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, BinaryWord>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for e in entries {
            if map.insert(e.value, e.parity).is_some() {
                return Err(serde::de::Error::custom(format!("value {} listed twice", e.value)));
            }
        }
        Ok(map)
    }
}

/// Systematic encoder `u ↦ (u, p(u))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEncoder {
    pub k: usize,
    pub r: usize,
    pub t: u32,
    pub family: Family,
    pub function: FunctionSpec,
    pub rule: ParityRule,
}

impl PairEncoder {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let enc: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        enc.check_shape()?;
        Ok(enc)
    }

    /// Structural consistency: every parity word has length `r`.
    pub fn check_shape(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::EmptyWord);
        }
        if self.k + self.r > MAX_CODEWORD_LENGTH {
            return Err(Error::TooLarge {
                what: "codeword length",
                value: self.k + self.r,
                limit: MAX_CODEWORD_LENGTH,
            });
        }
        let words: Vec<&BinaryWord> = match &self.rule {
            ParityRule::Empty => {
                return if self.r == 0 {
                    Ok(())
                } else {
                    Err(Error::Parse(format!("empty parity rule with r = {}", self.r)))
                };
            }
            ParityRule::WeightCycle { words } => {
                if words.is_empty() {
                    return Err(Error::Parse("weight cycle without words".into()));
                }
                words.iter().collect()
            }
            ParityRule::ByValue { parities } => parities.values().collect(),
            ParityRule::Table { parities } => {
                if parities.len() as u64 != 1u64 << self.k {
                    return Err(Error::SizeMismatch {
                        expected: 1 << self.k,
                        actual: parities.len(),
                    });
                }
                parities.iter().collect()
            }
        };
        if let Some(w) = words.iter().find(|w| w.len() != self.r) {
            return Err(Error::LengthMismatch {
                left: self.r,
                right: w.len(),
            });
        }
        Ok(())
    }

    pub fn codeword_length(&self) -> usize {
        self.k + self.r
    }

    /// Parity of message `u` as an `r`-bit integer.
    pub fn parity_u64(&self, u: u64, f: &FunctionTable) -> Result<u64> {
        let word = match &self.rule {
            ParityRule::Empty => return Ok(0),
            ParityRule::WeightCycle { words } => {
                let w = u64::from(pair_weight_u64(u, self.k as u32));
                &words[(smod(w + 1, words.len() as u64) - 1) as usize]
            }
            ParityRule::ByValue { parities } => {
                let v = f.eval(u);
                parities.get(&v).ok_or(Error::ValueNotInImage(v))?
            }
            ParityRule::Table { parities } => &parities[u as usize],
        };
        Ok(word.as_u64().expect("r <= 64"))
    }

    /// `(u, p(u))` as a `(k + r)`-bit integer.
    pub fn codeword_u64(&self, u: u64, f: &FunctionTable) -> Result<u64> {
        Ok(concat_u64(u, self.parity_u64(u, f)?, self.r as u32))
    }

    /// All codewords, indexed by message.
    pub fn codewords(&self, f: &FunctionTable) -> Result<Vec<u64>> {
        self.check_against(f)?;
        (0..f.messages()).map(|u| self.codeword_u64(u, f)).collect()
    }

    pub fn encode(&self, u: &BinaryWord, f: &FunctionTable) -> Result<BinaryWord> {
        self.check_against(f)?;
        let _ = f.eval_word(u)?;
        let c = self.codeword_u64(u.as_u64().expect("k <= 22"), f)?;
        BinaryWord::from_u64(c, self.codeword_length())
    }

    pub(crate) fn check_against(&self, f: &FunctionTable) -> Result<()> {
        self.check_shape()?;
        if f.k() != self.k {
            return Err(Error::LengthMismatch {
                left: self.k,
                right: f.k(),
            });
        }
        if let ParityRule::ByValue { parities } = &self.rule {
            if let Some(&v) = f.image().iter().find(|v| !parities.contains_key(v)) {
                return Err(Error::ValueNotInImage(v));
            }
        }
        Ok(())
    }
}

/// Built-in base codes of `2t + 1` words with minimum pair distance `2t`.
pub fn builtin_base(t: u32) -> Option<Vec<BinaryWord>> {
    let words: &[&str] = match t {
        1 => &["00", "10", "01"],
        2 => &["00000", "11100", "10110", "11001", "01111"],
        3 => &[
            "0001100", "0011011", "0100010", "0110101", "1000111", "1010000", "1101001",
        ],
        _ => return None,
    };
    Some(words.iter().map(|w| w.parse().expect("valid")).collect())
}

fn check_t(t: u32) -> Result<()> {
    if t == 0 {
        return Err(Error::Domain("t must be at least 1".into()));
    }
    Ok(())
}

/// Parity cycles through `2t + 1` base words by pair weight. Without an
/// explicit base the built-in one for `t ≤ 3` is used.
pub fn encode_pair_weight(k: usize, t: u32, base: Option<&[BinaryWord]>) -> Result<PairEncoder> {
    check_t(t)?;
    if k < 2 {
        return Err(Error::Domain(format!("needs k >= 2, got {k}")));
    }
    let base = match base {
        Some(b) => b.to_vec(),
        None => builtin_base(t).ok_or_else(|| {
            Error::BadBaseCode(format!("no built-in base code for t = {t}; supply one"))
        })?,
    };
    let size = 2 * t as usize + 1;
    if base.len() != size {
        return Err(Error::BadBaseCode(format!(
            "needs {size} words, got {}",
            base.len()
        )));
    }
    let r = base[0].len();
    if let Some(w) = base.iter().find(|w| w.len() != r) {
        return Err(Error::BadBaseCode(format!("word {w} has length {} not {r}", w.len())));
    }
    let d = min_pair_distance(&base)?;
    if d < 2 * t as usize {
        return Err(Error::BadBaseCode(format!(
            "minimum pair distance {d} is below {}",
            2 * t
        )));
    }
    let enc = PairEncoder {
        k,
        r,
        t,
        family: Family::Weight,
        function: FunctionSpec::PairWeight,
        rule: ParityRule::WeightCycle { words: base },
    };
    enc.check_shape()?;
    Ok(enc)
}

/// The `period` parity words for the pair weight distribution:
/// `1^{i−1} 0^{2t−i+1}` for `i ≤ 2t + 1`, then `1^{2t}`.
pub fn distribution_parities(t: u32, period: u64) -> Vec<BinaryWord> {
    let r = 2 * t as usize;
    (1..=period as usize)
        .map(|i| BinaryWord::prefix_ones((i - 1).min(r), r).expect("r >= 2"))
        .collect()
}

pub fn encode_weight_distribution(k: usize, t: u32, period: u64) -> Result<PairEncoder> {
    check_t(t)?;
    if k < 2 {
        return Err(Error::Domain(format!("needs k >= 2, got {k}")));
    }
    if period == 0 || !(k as u64 + 1).is_multiple_of(period) {
        return Err(Error::Domain(format!("T = {period} must divide k + 1 = {}", k + 1)));
    }
    if period < 2 * u64::from(t) + 1 {
        return Err(Error::Domain(format!(
            "T = {period} must be at least 2t + 1 = {}",
            2 * t + 1
        )));
    }
    let enc = PairEncoder {
        k,
        r: 2 * t as usize,
        t,
        family: Family::Dist,
        function: FunctionSpec::WeightDistribution { period },
        rule: ParityRule::WeightCycle {
            words: distribution_parities(t, period),
        },
    };
    enc.check_shape()?;
    Ok(enc)
}

/// `(2t − 1)`-fold repetition of the bit `[f(u) = max B_p^f(u, 2t)]`.
pub fn encode_locally_binary(f: &FunctionTable, t: u32) -> Result<PairEncoder> {
    check_t(t)?;
    let rho = 2 * t;
    if let Some((u, size)) = wide_ball_witness(f, rho, Metric::Pair)? {
        return Err(Error::NotPairLocallyBinary {
            rho,
            word: f.message(u).to_string(),
            size,
        });
    }
    let r = 2 * t as usize - 1;
    let ones = BinaryWord::ones(r)?;
    let zeros = BinaryWord::zeros(r)?;
    let parities = ball_maxima(f, rho)?
        .into_iter()
        .enumerate()
        .map(|(u, top)| {
            if f.eval(u as u64) == top {
                ones.clone()
            } else {
                zeros.clone()
            }
        })
        .collect();
    Ok(PairEncoder {
        k: f.k(),
        r,
        t,
        family: Family::Locally,
        function: f.spec().clone(),
        rule: ParityRule::Table { parities },
    })
}

/// Encoder that gives every message of class `i` the parity `words[i]`.
pub fn encode_by_class(f: &FunctionTable, t: u32, words: &[BinaryWord]) -> Result<PairEncoder> {
    if words.len() != f.image_size() {
        return Err(Error::SizeMismatch {
            expected: f.image_size(),
            actual: words.len(),
        });
    }
    let r = words.first().map_or(0, BinaryWord::len);
    let rule = if r == 0 {
        ParityRule::Empty
    } else {
        ParityRule::ByValue {
            parities: f.image().iter().copied().zip(words.iter().cloned()).collect(),
        }
    };
    let enc = PairEncoder {
        k: f.k(),
        r,
        t,
        family: Family::Class,
        function: f.spec().clone(),
        rule,
    };
    enc.check_shape()?;
    Ok(enc)
}

/// Class parities from a code meeting the function's upper requirement
/// matrix: exact when the image is small enough and `exact` is set, a
/// greedy code at the GV length otherwise.
pub fn encode_from_function_matrix(
    f: &FunctionTable,
    t: u32,
    exact: bool,
    seed: u64,
) -> Result<PairEncoder> {
    check_t(t)?;
    let d = build_function_matrix(f, t, MatrixKind::Upper)?;
    let words = if d.is_zero() {
        Vec::new()
    } else if exact && d.size() <= MAX_EXACT_CODEWORDS {
        exact_np(&d, Metric::Pair, crate::irregular::MAX_EXACT_LENGTH)?
            .witness
            .words
    } else {
        let order = default_order(&d);
        let r = gv_upper_bound(&d, &order, Metric::Pair)? as usize;
        greedy_construct(&d, r, &order, Metric::Pair, seed)?.words
    };
    if words.is_empty() {
        return Ok(PairEncoder {
            k: f.k(),
            r: 0,
            t,
            family: Family::Class,
            function: f.spec().clone(),
            rule: ParityRule::Empty,
        });
    }
    encode_by_class(f, t, &words)
}
