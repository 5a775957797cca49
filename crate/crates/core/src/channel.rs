//! Symbol-pair read channel and function-value decoding.
//!
//! The channel reads a codeword `c` as `π(c)` and corrupts at most `t` pair
//! symbols. Each corrupted symbol is replaced by one of the three other
//! pairs, uniformly. Corrupted outputs need not be consistent.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcspc::{Family, FunctionTable, PairEncoder};
use crate::pairmetric::{pair_read, rotl_u64, BinaryWord, PairVector};

/// Decoders enumerate all messages up to this length.
pub const MAX_DECODE_LENGTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// Exactly `min(t, n)` corrupted positions.
    Exactly,
    /// A uniformly drawn count in `0..=t`.
    UpTo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub t: usize,
    pub mode: ErrorMode,
    pub seed: u64,
}

/// Sends `c` through the channel with a generator seeded from `cfg.seed`.
pub fn transmit(c: &BinaryWord, cfg: &ChannelConfig) -> PairVector {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    transmit_with(c, cfg.t, cfg.mode, &mut rng)
}

pub fn transmit_with<R: Rng + ?Sized>(c: &BinaryWord, t: usize, mode: ErrorMode, rng: &mut R) -> PairVector {
    let mut y = pair_read(c);
    let n = c.len();
    let count = match mode {
        ErrorMode::Exactly => t.min(n),
        ErrorMode::UpTo => rng.gen_range(0..=t.min(n)),
    };
    for i in sample(rng, n, count).into_vec() {
        let (a, b) = y.pair(i);
        let old = (a as u8) << 1 | b as u8;
        let new = (old + rng.gen_range(1..4)) % 4;
        y.set_pair(i, (new & 2 != 0, new & 1 != 0));
    }
    y
}

/// Codewords of an encoder with their classes, ready for repeated decoding.
pub struct Decoder {
    n: u32,
    words: Vec<u64>,
    rotated: Vec<u64>,
    // value of each class, ascending
    image: Vec<i64>,
    classes: Vec<usize>,
    // messages grouped by parity word, with the parity itself
    groups: Vec<(u64, Vec<u32>)>,
    r: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Nearest {
    distance: u32,
    classes: Vec<usize>,
}

impl Decoder {
    pub fn new(enc: &PairEncoder, f: &FunctionTable) -> Result<Self> {
        if f.k() > MAX_DECODE_LENGTH {
            return Err(Error::TooLarge {
                what: "message length for decoding",
                value: f.k(),
                limit: MAX_DECODE_LENGTH,
            });
        }
        let words = enc.codewords(f)?;
        let n = enc.codeword_length() as u32;
        let rotated = words.iter().map(|&w| rotl_u64(w, n)).collect();
        let mut by_parity: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for u in 0..f.messages() {
            by_parity
                .entry(enc.parity_u64(u, f)?)
                .or_default()
                .push(u as u32);
        }
        Ok(Self {
            n,
            rotated,
            image: f.image().to_vec(),
            classes: (0..f.messages()).map(|u| f.class(u)).collect(),
            groups: by_parity.into_iter().collect(),
            r: enc.r as u32,
            words,
        })
    }

    pub fn codeword_length(&self) -> usize {
        self.n as usize
    }

    fn split(&self, y: &PairVector) -> Result<(u64, u64)> {
        if y.len() != self.n as usize {
            return Err(Error::LengthMismatch {
                left: self.n as usize,
                right: y.len(),
            });
        }
        Ok((
            y.left().as_u64().expect("n <= 64"),
            y.right().as_u64().expect("n <= 64"),
        ))
    }

    #[inline]
    fn distance(&self, u: usize, left: u64, right: u64) -> u32 {
        ((self.words[u] ^ left) | (self.rotated[u] ^ right)).count_ones()
    }

    fn resolve(&self, nearest: Nearest) -> Result<i64> {
        let mut values: Vec<i64> = nearest.classes.iter().map(|&c| self.image[c]).collect();
        values.sort_unstable();
        values.dedup();
        match values[..] {
            [v] => Ok(v),
            _ => Err(Error::Ambiguous { values }),
        }
    }

    fn offer(best: &mut Nearest, d: u32, class: usize) {
        if d < best.distance {
            best.distance = d;
            best.classes.clear();
            best.classes.push(class);
        } else if d == best.distance && !best.classes.contains(&class) {
            best.classes.push(class);
        }
    }

    /// `f(u*)` for the message nearest to `y` over all messages.
    pub fn decode(&self, y: &PairVector) -> Result<i64> {
        let (left, right) = self.split(y)?;
        self.decode_raw(left, right)
    }

    pub(crate) fn decode_raw(&self, left: u64, right: u64) -> Result<i64> {
        let mut best = Nearest {
            distance: u32::MAX,
            classes: Vec::new(),
        };
        for u in 0..self.words.len() {
            Self::offer(&mut best, self.distance(u, left, right), self.classes[u]);
        }
        self.resolve(best)
    }

    /// Same answer as [`decode`](Self::decode), visiting parity groups in
    /// order of how well the parity's inner pairs match `y` and skipping
    /// groups that cannot reach the current best distance.
    pub fn decode_grouped(&self, y: &PairVector) -> Result<i64> {
        let (left, right) = self.split(y)?;
        // pairs lying wholly inside the parity sit at the low bits 1..r-1
        let inner = mask(self.r) & !1;
        let bounds: Vec<u32> = self
            .groups
            .iter()
            .map(|&(p, _)| (((p ^ left) | ((p << 1) ^ right)) & inner).count_ones())
            .collect();
        let mut order: Vec<usize> = (0..self.groups.len()).collect();
        order.sort_by_key(|&g| bounds[g]);
        let mut best = Nearest {
            distance: u32::MAX,
            classes: Vec::new(),
        };
        for g in order {
            if bounds[g] > best.distance {
                break;
            }
            for &u in &self.groups[g].1 {
                let u = u as usize;
                Self::offer(&mut best, self.distance(u, left, right), self.classes[u]);
            }
        }
        self.resolve(best)
    }
}

fn mask(r: u32) -> u64 {
    if r >= 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

/// Nearest-message function decoding by exhaustive search.
pub fn decode_function(y: &PairVector, enc: &PairEncoder, f: &FunctionTable) -> Result<i64> {
    Decoder::new(enc, f)?.decode(y)
}

/// One batch of round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub successes: u64,
    pub ambiguous: u64,
    pub t: usize,
    pub k: usize,
    pub r: usize,
    pub family: Family,
    pub seed: u64,
}

impl TrialStats {
    pub fn success_rate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.successes as f64 / self.trials as f64)
    }
}

#[derive(Default)]
struct Tally {
    trials: u64,
    successes: u64,
    ambiguous: u64,
}

impl Tally {
    fn add(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.successes += other.successes;
        self.ambiguous += other.ambiguous;
        self
    }

    fn record(outcome: Result<i64>, expected: i64) -> Result<Tally> {
        let mut t = Tally {
            trials: 1,
            ..Tally::default()
        };
        match outcome {
            Ok(v) if v == expected => t.successes = 1,
            Ok(_) => {}
            Err(Error::Ambiguous { .. }) => t.ambiguous = 1,
            Err(e) => return Err(e),
        }
        Ok(t)
    }
}

/// Random messages through the channel and back. Trial `i` draws from the
/// generator seeded with `cfg.seed` on stream `i`, so the result does not
/// depend on scheduling.
pub fn round_trip_experiment(
    f: &FunctionTable,
    enc: &PairEncoder,
    cfg: &ChannelConfig,
    trials: u64,
) -> Result<TrialStats> {
    let decoder = Decoder::new(enc, f)?;
    let n = decoder.codeword_length();
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i);
            let u = rng.gen_range(0..f.messages());
            let c = BinaryWord::from_u64(decoder.words[u as usize], n).expect("fits");
            let y = transmit_with(&c, cfg.t, cfg.mode, &mut rng);
            Tally::record(decoder.decode(&y), f.eval(u))
        })
        .try_reduce(Tally::default, |a, b| Ok(a.add(b)))?;
    Ok(TrialStats {
        trials: tally.trials,
        successes: tally.successes,
        ambiguous: tally.ambiguous,
        t: cfg.t,
        k: enc.k,
        r: enc.r,
        family: enc.family,
        seed: cfg.seed,
    })
}

/// Every message against every pair-error pattern of weight at most `t`.
pub fn exhaustive_round_trip(f: &FunctionTable, enc: &PairEncoder, t: usize) -> Result<TrialStats> {
    let decoder = Decoder::new(enc, f)?;
    let n = decoder.n;
    let tally = (0..f.messages())
        .into_par_iter()
        .map(|u| {
            let left = decoder.words[u as usize];
            let right = decoder.rotated[u as usize];
            let expected = f.eval(u);
            let mut tally = Tally::default();
            let mut err = None;
            for_each_pattern(n, t, &mut |dl, dr| {
                if err.is_some() {
                    return;
                }
                match Tally::record(decoder.decode_raw(left ^ dl, right ^ dr), expected) {
                    Ok(one) => tally = std::mem::take(&mut tally).add(one),
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(tally), Err)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.add(b)))?;
    Ok(TrialStats {
        trials: tally.trials,
        successes: tally.successes,
        ambiguous: tally.ambiguous,
        t,
        k: enc.k,
        r: enc.r,
        family: enc.family,
        seed: 0,
    })
}

/// Calls `visit(left_flips, right_flips)` for every error pattern touching
/// at most `t` of the `n` pair positions, each with a nonzero change.
pub fn for_each_pattern(n: u32, t: usize, visit: &mut dyn FnMut(u64, u64)) {
    fn rec(n: u32, start: u32, left: usize, dl: u64, dr: u64, visit: &mut dyn FnMut(u64, u64)) {
        visit(dl, dr);
        if left == 0 {
            return;
        }
        for pos in start..n {
            let bit = 1u64 << pos;
            for change in 1..4u8 {
                let l = if change & 2 != 0 { bit } else { 0 };
                let r = if change & 1 != 0 { bit } else { 0 };
                rec(n, pos + 1, left - 1, dl | l, dr | r, visit);
            }
        }
    }
    rec(n, 0, t, 0, 0, visit);
}
