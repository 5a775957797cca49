use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairmetric::{pair_weight_u64, BinaryWord};

/// Largest message length for which a full value table is built.
pub const MAX_TABLE_LENGTH: usize = 22;

/// Which function a table (or an encoder) refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `u ↦ w_p(u)`.
    PairWeight,
    /// `u ↦ ⌊w_p(u) / period⌋`.
    WeightDistribution { period: u64 },
    /// `u ↦ i` if `u` is the `i`-th word of the code (1-based), else 0.
    CodeIndicator { code: Vec<BinaryWord> },
    /// Arbitrary table supplied by the user.
    Custom,
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::PairWeight => write!(f, "weight"),
            FunctionSpec::WeightDistribution { period } => write!(f, "dist:{period}"),
            FunctionSpec::CodeIndicator { code } => {
                let words: Vec<String> = code.iter().map(ToString::to_string).collect();
                write!(f, "indicator:{}", words.join(","))
            }
            FunctionSpec::Custom => write!(f, "custom"),
        }
    }
}

/// `weight`, `dist:T` or `indicator:w1,w2,…`.
impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "weight" | "pair_weight" => Ok(FunctionSpec::PairWeight),
            "dist" | "distribution" => tail
                .parse()
                .map(|period| FunctionSpec::WeightDistribution { period })
                .map_err(|_| Error::Parse(format!("bad period in {s:?}"))),
            "indicator" => Ok(FunctionSpec::CodeIndicator {
                code: tail
                    .split(',')
                    .map(str::trim)
                    .filter(|w| !w.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?,
            }),
            _ => Err(Error::Parse(format!("unknown function {s:?}"))),
        }
    }
}

/// A function on `Z_2^k` stored as a full value table.
///
/// Messages are indexed by their integer value, most significant bit first,
/// so message `i` is `BinaryWord::from_u64(i, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    k: usize,
    spec: FunctionSpec,
    values: Vec<i64>,
    image: Vec<i64>,
    classes: Vec<u32>,
}

impl FunctionTable {
    pub fn from_values(k: usize, values: Vec<i64>, spec: FunctionSpec) -> Result<Self> {
        check_length(k)?;
        if values.len() != 1 << k {
            return Err(Error::SizeMismatch {
                expected: 1 << k,
                actual: values.len(),
            });
        }
        let image: Vec<i64> = values
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let classes = values
            .iter()
            .map(|v| image.binary_search(v).expect("in image") as u32)
            .collect();
        Ok(Self {
            k,
            spec,
            values,
            image,
            classes,
        })
    }

    pub fn from_fn(k: usize, spec: FunctionSpec, f: impl Fn(u64) -> i64) -> Result<Self> {
        check_length(k)?;
        Self::from_values(k, (0..1u64 << k).map(f).collect(), spec)
    }

    /// Builds the table a spec describes for messages of length `k`.
    pub fn from_spec(spec: &FunctionSpec, k: usize) -> Result<Self> {
        match spec {
            FunctionSpec::PairWeight => pair_weight_fn(k),
            FunctionSpec::WeightDistribution { period } => weight_distribution_fn(k, *period),
            FunctionSpec::CodeIndicator { code } => {
                if let Some(w) = code.iter().find(|w| w.len() != k) {
                    return Err(Error::LengthMismatch {
                        left: k,
                        right: w.len(),
                    });
                }
                code_indicator_fn(code)
            }
            FunctionSpec::Custom => Err(Error::Domain(
                "a custom function needs its value table".into(),
            )),
        }
    }

    /// Lines of `<bits> <value>`; `#` starts a comment. Every message of
    /// the common length must appear exactly once.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(|c: char| c.is_whitespace() || c == ',');
            let fields: Vec<&str> = fields.by_ref().filter(|f| !f.is_empty()).collect();
            let [bits, value] = fields[..] else {
                return Err(Error::Parse(format!("expected `<bits> <value>`, got {line:?}")));
            };
            let word: BinaryWord = bits.parse()?;
            let value: i64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad value {value:?}")))?;
            entries.push((word, value));
        }
        let Some(k) = entries.first().map(|(w, _)| w.len()) else {
            return Err(Error::Parse("empty function table".into()));
        };
        check_length(k)?;
        let mut values = vec![None; 1 << k];
        for (word, value) in entries {
            if word.len() != k {
                return Err(Error::LengthMismatch {
                    left: k,
                    right: word.len(),
                });
            }
            let slot = &mut values[word.as_u64().expect("k <= 22") as usize];
            if slot.is_some() {
                return Err(Error::DuplicateMessage(word.to_string()));
            }
            *slot = Some(value);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::Parse(format!(
                        "message {} missing from table",
                        BinaryWord::from_u64(i as u64, k).expect("fits")
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(k, values, FunctionSpec::Custom)
    }

    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{} {v}\n", self.message(u as u64)));
        }
        out
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    #[inline]
    pub fn eval(&self, u: u64) -> i64 {
        self.values[u as usize]
    }

    pub fn eval_word(&self, u: &BinaryWord) -> Result<i64> {
        if u.len() != self.k {
            return Err(Error::LengthMismatch {
                left: self.k,
                right: u.len(),
            });
        }
        Ok(self.eval(u.as_u64().expect("k <= 22")))
    }

    /// Distinct values in ascending order.
    pub fn image(&self) -> &[i64] {
        &self.image
    }

    /// `E = |Im(f)|`.
    pub fn image_size(&self) -> usize {
        self.image.len()
    }

    /// Position of `f(u)` in [`image`](Self::image).
    #[inline]
    pub fn class(&self, u: u64) -> usize {
        self.classes[u as usize] as usize
    }

    pub fn class_of_value(&self, value: i64) -> Result<usize> {
        self.image
            .binary_search(&value)
            .map_err(|_| Error::ValueNotInImage(value))
    }

    /// Messages grouped by class, each group in ascending order.
    pub fn preimages(&self) -> Vec<Vec<u64>> {
        let mut groups = vec![Vec::new(); self.image.len()];
        for (u, &c) in self.classes.iter().enumerate() {
            groups[c as usize].push(u as u64);
        }
        groups
    }

    pub fn message(&self, u: u64) -> BinaryWord {
        BinaryWord::from_u64(u, self.k).expect("message fits")
    }

    pub fn messages(&self) -> u64 {
        1 << self.k
    }
}

fn check_length(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::EmptyWord);
    }
    if k > MAX_TABLE_LENGTH {
        return Err(Error::TooLarge {
            what: "message length",
            value: k,
            limit: MAX_TABLE_LENGTH,
        });
    }
    Ok(())
}

fn check_min_length(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Domain(format!("message length must be at least 2, got {k}")));
    }
    Ok(())
}

pub fn pair_weight_fn(k: usize) -> Result<FunctionTable> {
    check_min_length(k)?;
    check_length(k)?;
    FunctionTable::from_fn(k, FunctionSpec::PairWeight, |u| {
        i64::from(pair_weight_u64(u, k as u32))
    })
}

/// `⌊w_p(u) / period⌋`. Whether `period` suits a given `t` is checked by the
/// encoder, not here.
pub fn weight_distribution_fn(k: usize, period: u64) -> Result<FunctionTable> {
    check_min_length(k)?;
    check_length(k)?;
    if period == 0 {
        return Err(Error::Domain("period must be positive".into()));
    }
    FunctionTable::from_fn(k, FunctionSpec::WeightDistribution { period }, |u| {
        (u64::from(pair_weight_u64(u, k as u32)) / period) as i64
    })
}

/// `q_i ↦ i` for the words of `code` (1-based), every other message `↦ 0`.
pub fn code_indicator_fn(code: &[BinaryWord]) -> Result<FunctionTable> {
    let Some(k) = code.first().map(BinaryWord::len) else {
        return Err(Error::CodeTooSmall(0));
    };
    check_min_length(k)?;
    check_length(k)?;
    let mut values = vec![0i64; 1 << k];
    for (i, w) in code.iter().enumerate() {
        if w.len() != k {
            return Err(Error::LengthMismatch {
                left: k,
                right: w.len(),
            });
        }
        let slot = &mut values[w.as_u64().expect("k <= 22") as usize];
        if *slot != 0 {
            return Err(Error::DuplicateMessage(w.to_string()));
        }
        *slot = i as i64 + 1;
    }
    FunctionTable::from_values(
        k,
        values,
        FunctionSpec::CodeIndicator {
            code: code.to_vec(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_weight_table() {
        let f = pair_weight_fn(6).unwrap();
        assert_eq!(f.eval_word(&"110000".parse().unwrap()).unwrap(), 3);
        assert_eq!(f.image(), &[0, 2, 3, 4, 5, 6]);
        assert_eq!(f.image_size(), 6);
        assert_eq!(f.class(0), 0);
        assert!(f.class_of_value(1).is_err());
        for k in 2..10 {
            assert_eq!(pair_weight_fn(k).unwrap().image_size(), k);
        }
        assert!(pair_weight_fn(1).is_err());
        assert!(pair_weight_fn(23).is_err());
    }

    #[test]
    fn distribution_table() {
        let f = weight_distribution_fn(9, 5).unwrap();
        assert_eq!(f.image(), &[0, 1]);
        for u in 0..f.messages() {
            assert_eq!(f.eval(u), i64::from(pair_weight_u64(u, 9)) / 5);
        }
        assert_eq!(weight_distribution_fn(11, 3).unwrap().image_size(), 4);
    }

    #[test]
    fn indicator_table() {
        let code: Vec<BinaryWord> = ["0011", "1100"].iter().map(|w| w.parse().unwrap()).collect();
        let f = code_indicator_fn(&code).unwrap();
        assert_eq!(f.eval(0b0011), 1);
        assert_eq!(f.eval(0b1100), 2);
        assert_eq!(f.eval(0b0101), 0);
        assert_eq!(f.image(), &[0, 1, 2]);
        let dup = vec![code[0].clone(), code[0].clone()];
        assert!(matches!(code_indicator_fn(&dup), Err(Error::DuplicateMessage(_))));
    }

    #[test]
    fn spec_strings() {
        for s in ["weight", "dist:5", "indicator:0011,1100"] {
            assert_eq!(s.parse::<FunctionSpec>().unwrap().to_string(), s);
        }
        assert!("nope".parse::<FunctionSpec>().is_err());
        assert!("dist:x".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn table_round_trip() {
        let f = weight_distribution_fn(4, 2).unwrap();
        let g = FunctionTable::parse_table(&f.to_table_string()).unwrap();
        assert_eq!(g.image(), f.image());
        for u in 0..16 {
            assert_eq!(g.eval(u), f.eval(u));
        }
        assert!(FunctionTable::parse_table("00 1\n01 1\n10 0\n").is_err());
        assert!(FunctionTable::parse_table("00 1\n00 1\n").is_err());
    }
}
