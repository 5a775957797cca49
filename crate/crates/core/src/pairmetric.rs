//! Binary words, the cyclic symbol-pair read map and the pair metric.
//!
//! A [`BinaryWord`] of length `n` is stored as an `n`-bit big integer whose
//! most significant bit is index 0, so for `n <= 64` the word fits a single
//! `u64` whose numeric value is the word read left to right. Longer words
//! spill into additional limbs. Hot loops elsewhere in the crate work on raw
//! `u64` values through the `*_u64` kernels at the bottom of this module.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

type Limbs = SmallVec<[u64; 1]>;

fn limb_count(n: usize) -> usize {
    n.div_ceil(64)
}

fn top_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A non-empty word over `{0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    len: usize,
    // limb 0 holds the least significant 64 bits (the tail of the word)
    limbs: Limbs,
}

impl BinaryWord {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyWord);
        }
        Ok(Self {
            len: n,
            limbs: smallvec::smallvec![0; limb_count(n)],
        })
    }

    pub fn ones(n: usize) -> Result<Self> {
        let mut w = Self::zeros(n)?;
        for l in w.limbs.iter_mut() {
            *l = u64::MAX;
        }
        w.normalize();
        Ok(w)
    }

    /// Builds a word of length `n` from the low `n` bits of `value`, read
    /// most significant first.
    pub fn from_u64(value: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyWord);
        }
        if n > 64 {
            let mut w = Self::zeros(n)?;
            w.limbs[0] = value;
            return Ok(w);
        }
        if n < 64 && value >> n != 0 {
            return Err(Error::Domain(format!(
                "value {value:#x} does not fit in {n} bits"
            )));
        }
        Ok(Self {
            len: n,
            limbs: smallvec::smallvec![value],
        })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Result<Self> {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut w = Self::zeros(bits.len())?;
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                w.set(i, true);
            }
        }
        Ok(w)
    }

    /// `1^ones 0^(n - ones)`.
    pub fn prefix_ones(ones: usize, n: usize) -> Result<Self> {
        if ones > n {
            return Err(Error::Domain(format!("{ones} ones do not fit in {n} bits")));
        }
        Self::from_bits((0..n).map(|i| i < ones))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; words have at least one bit.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The word as an integer, when it fits in 64 bits.
    pub fn as_u64(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.limbs[0])
    }

    #[inline]
    fn position(&self, i: usize) -> (usize, u32) {
        let g = self.len - 1 - i;
        (g / 64, (g % 64) as u32)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let (limb, bit) = self.position(i);
        (self.limbs[limb] >> bit) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let (limb, bit) = self.position(i);
        if value {
            self.limbs[limb] |= 1 << bit;
        } else {
            self.limbs[limb] &= !(1 << bit);
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn hamming_weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            len: self.len,
            limbs,
        })
    }

    pub fn complement(&self) -> Self {
        let mut w = self.clone();
        for l in w.limbs.iter_mut() {
            *l = !*l;
        }
        w.normalize();
        w
    }

    /// `(self, tail)` as one word of length `self.len() + tail.len()`.
    pub fn concat(&self, tail: &Self) -> Self {
        Self::from_bits(self.bits().chain(tail.bits())).expect("non-empty")
    }

    /// Sub-word `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len {
            return Err(Error::Domain(format!(
                "slice {start}..{} out of range for length {}",
                start + len,
                self.len
            )));
        }
        Self::from_bits((start..start + len).map(|i| self.get(i)))
    }

    /// Cyclic shift so that bit `i` of the result is bit `i + 1 (mod n)` of
    /// `self`.
    pub fn rotate_forward(&self) -> Self {
        if let Some(v) = self.as_u64() {
            return Self {
                len: self.len,
                limbs: smallvec::smallvec![rotl_u64(v, self.len as u32)],
            };
        }
        Self::from_bits((0..self.len).map(|i| self.get((i + 1) % self.len))).expect("non-empty")
    }

    fn normalize(&mut self) {
        let last = self.limbs.len() - 1;
        self.limbs[last] &= top_mask(self.len);
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        self.limbs.iter().rev().cmp(other.limbs.iter().rev())
    }
}

impl Ord for BinaryWord {
    /// Shorter words first; equal lengths compare lexicographically from
    /// index 0.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.cmp_value(other))
    }
}

impl PartialOrd for BinaryWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryWord({self})")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptyWord);
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(bits)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A length-`n` sequence of bit pairs, stored as the word of left symbols and
/// the word of right symbols. Pair `i` is `(left_i, right_i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairVector {
    left: BinaryWord,
    right: BinaryWord,
}

impl PairVector {
    pub fn new(left: BinaryWord, right: BinaryWord) -> Result<Self> {
        check_len(left.len(), right.len())?;
        Ok(Self { left, right })
    }

    pub fn from_pairs(pairs: &[(bool, bool)]) -> Result<Self> {
        let left = BinaryWord::from_bits(pairs.iter().map(|p| p.0))?;
        let right = BinaryWord::from_bits(pairs.iter().map(|p| p.1))?;
        Ok(Self { left, right })
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn left(&self) -> &BinaryWord {
        &self.left
    }

    pub fn right(&self) -> &BinaryWord {
        &self.right
    }

    pub fn pair(&self, i: usize) -> (bool, bool) {
        (self.left.get(i), self.right.get(i))
    }

    pub fn set_pair(&mut self, i: usize, pair: (bool, bool)) {
        self.left.set(i, pair.0);
        self.right.set(i, pair.1);
    }

    pub fn pairs(&self) -> impl Iterator<Item = (bool, bool)> + '_ {
        (0..self.len()).map(move |i| self.pair(i))
    }
}

impl fmt::Display for PairVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", a as u8, b as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PairVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairVector({self})")
    }
}

impl FromStr for PairVector {
    type Err = Error;

    /// Whitespace- or comma-separated two-character pair symbols, e.g.
    /// `"01 10 00"`.
    fn from_str(s: &str) -> Result<Self> {
        let pairs = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                let w: BinaryWord = t.parse()?;
                if w.len() != 2 {
                    return Err(Error::Parse(format!("pair symbol {t:?} is not two bits")));
                }
                Ok((w.get(0), w.get(1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(&pairs)
    }
}

/// Which distance a code is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Pair,
    Hamming,
}

impl Metric {
    pub fn distance(self, x: &BinaryWord, y: &BinaryWord) -> Result<usize> {
        match self {
            Metric::Pair => pair_distance(x, y),
            Metric::Hamming => hamming_distance(x, y),
        }
    }

    #[inline]
    pub fn distance_u64(self, x: u64, y: u64, n: u32) -> u32 {
        match self {
            Metric::Pair => pair_distance_u64(x, y, n),
            Metric::Hamming => (x ^ y).count_ones(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Pair => "pair",
            Metric::Hamming => "hamming",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" => Ok(Metric::Pair),
            "hamming" => Ok(Metric::Hamming),
            other => Err(Error::Parse(format!("unknown metric {other:?}"))),
        }
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// `π(x) = ((x_0,x_1), (x_1,x_2), …, (x_{n-1}, x_0))`.
pub fn pair_read(x: &BinaryWord) -> PairVector {
    PairVector {
        left: x.clone(),
        right: x.rotate_forward(),
    }
}

pub fn is_consistent(y: &PairVector) -> bool {
    y.right == y.left.rotate_forward()
}

/// The unique word whose pair read is `y`.
pub fn extract_word(y: &PairVector) -> Result<BinaryWord> {
    if !is_consistent(y) {
        return Err(Error::InconsistentPairVector);
    }
    Ok(y.left.clone())
}

pub fn hamming_distance(x: &BinaryWord, y: &BinaryWord) -> Result<usize> {
    Ok(x.xor(y)?.hamming_weight())
}

pub fn pair_distance(x: &BinaryWord, y: &BinaryWord) -> Result<usize> {
    check_len(x.len, y.len)?;
    if let (Some(a), Some(b)) = (x.as_u64(), y.as_u64()) {
        return Ok(pair_distance_u64(a, b, x.len as u32) as usize);
    }
    let z = x.xor(y)?;
    // pair i differs iff z_i or z_{i+1} is set
    let shifted = z.rotate_forward();
    Ok(z.limbs
        .iter()
        .zip(&shifted.limbs)
        .map(|(a, b)| (a | b).count_ones() as usize)
        .sum())
}

pub fn pair_weight(x: &BinaryWord) -> usize {
    if let Some(v) = x.as_u64() {
        return pair_weight_u64(v, x.len as u32) as usize;
    }
    pair_distance(x, &BinaryWord::zeros(x.len).expect("non-empty")).expect("same length")
}

/// Number of positions at which the pair symbols of `a` and `b` differ.
pub fn pair_distance_raw(a: &PairVector, b: &PairVector) -> Result<usize> {
    check_len(a.len(), b.len())?;
    let dl = a.left.xor(&b.left)?;
    let dr = a.right.xor(&b.right)?;
    Ok(dl
        .limbs
        .iter()
        .zip(&dr.limbs)
        .map(|(x, y)| (x | y).count_ones() as usize)
        .sum())
}

pub fn min_pair_distance(code: &[BinaryWord]) -> Result<usize> {
    min_distance(code, Metric::Pair)
}

/// Minimum distance over unordered pairs of distinct indices.
pub fn min_distance(code: &[BinaryWord], metric: Metric) -> Result<usize> {
    if code.len() < 2 {
        return Err(Error::CodeTooSmall(code.len()));
    }
    let mut best = usize::MAX;
    for (i, x) in code.iter().enumerate() {
        for y in &code[i + 1..] {
            best = best.min(metric.distance(x, y)?);
        }
    }
    Ok(best)
}

/// Parses a code file: one word per line, `#` starts a comment.
pub fn parse_code(text: &str) -> Result<Vec<BinaryWord>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

#[inline]
fn mask_u64(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Rotation of an `n`-bit word such that index `i` receives index `i + 1`.
#[inline]
pub fn rotl_u64(x: u64, n: u32) -> u64 {
    debug_assert!((1..=64).contains(&n));
    if n == 64 {
        return x.rotate_left(1);
    }
    ((x << 1) | (x >> (n - 1))) & mask_u64(n)
}

#[inline]
pub fn pair_distance_u64(x: u64, y: u64, n: u32) -> u32 {
    let z = x ^ y;
    (z | rotl_u64(z, n)).count_ones()
}

#[inline]
pub fn pair_weight_u64(x: u64, n: u32) -> u32 {
    (x | rotl_u64(x, n)).count_ones()
}

/// Pair distance between the concatenations `(u1, p1)` and `(u2, p2)` with
/// `|u| = k`, `|p| = r`; `r = 0` means no parity.
#[inline]
pub fn concat_u64(u: u64, p: u64, r: u32) -> u64 {
    if r == 0 {
        u
    } else {
        (u << r) | p
    }
}
