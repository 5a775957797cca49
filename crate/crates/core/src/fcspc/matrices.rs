use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::FunctionTable;
use crate::error::{Error, Result};
use crate::irregular::DistanceMatrix;
use crate::pairmetric::{pair_distance_u64, BinaryWord, Metric};

/// Largest image size for which a function matrix is built.
pub const MAX_IMAGE_SIZE: usize = 64;
/// Largest message length for pair-ball scans of a function.
pub const MAX_BALL_LENGTH: usize = 20;

/// The two requirement matrices of a function.
///
/// `Lower` entries are `[2t − d]⁺`, a necessary condition on the parities;
/// `Upper` entries are `[2t + 2 − d]⁺`, a sufficient one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Lower,
    Upper,
}

impl MatrixKind {
    pub fn offset(self, t: u32) -> u32 {
        match self {
            MatrixKind::Lower => 2 * t,
            MatrixKind::Upper => 2 * t + 2,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            MatrixKind::Lower => 1,
            MatrixKind::Upper => 2,
        }
    }
}

impl TryFrom<u8> for MatrixKind {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(MatrixKind::Lower),
            2 => Ok(MatrixKind::Upper),
            _ => Err(Error::Domain(format!("matrix kind must be 1 or 2, got {v}"))),
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "lower" => Ok(MatrixKind::Lower),
            "2" | "upper" => Ok(MatrixKind::Upper),
            _ => Err(Error::Parse(format!("matrix kind {s:?}"))),
        }
    }
}

/// All `k`-bit offsets grouped by their distance from zero.
pub(crate) struct Shells {
    words: Vec<u64>,
    // words[starts[d]..starts[d + 1]] have distance d
    starts: Vec<usize>,
}

impl Shells {
    /// Offsets with distance at most `radius` (all of them when `None`).
    pub(crate) fn new(k: usize, metric: Metric, radius: Option<u32>) -> Self {
        let n = k as u32;
        let limit = radius.unwrap_or(n).min(n) as usize;
        let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); limit + 1];
        for z in 0..1u64 << k {
            let d = metric.distance_u64(z, 0, n) as usize;
            if d <= limit {
                buckets[d].push(z);
            }
        }
        let mut starts = Vec::with_capacity(limit + 2);
        let mut words = Vec::new();
        for b in buckets {
            starts.push(words.len());
            words.extend(b);
        }
        starts.push(words.len());
        Self { words, starts }
    }

    pub(crate) fn max_distance(&self) -> u32 {
        (self.starts.len() - 2) as u32
    }

    pub(crate) fn shell(&self, d: u32) -> &[u64] {
        let d = d as usize;
        if d + 1 >= self.starts.len() {
            return &[];
        }
        &self.words[self.starts[d]..self.starts[d + 1]]
    }

    pub(crate) fn all(&self) -> &[u64] {
        &self.words
    }
}

/// `d_p^f(v1, v2)`: smallest pair distance between a message with value
/// `v1` and one with value `v2`.
pub fn function_pair_distance(f: &FunctionTable, v1: i64, v2: i64) -> Result<u32> {
    let a = f.class_of_value(v1)?;
    let b = f.class_of_value(v2)?;
    if a == b {
        return Err(Error::Domain("d_p^f needs two different values".into()));
    }
    let k = f.k();
    let shells = Shells::new(k, Metric::Pair, None);
    let groups = f.preimages();
    let (from, to) = if groups[a].len() <= groups[b].len() {
        (&groups[a], b)
    } else {
        (&groups[b], a)
    };
    let best = AtomicU32::new(u32::MAX);
    from.par_iter().for_each(|&u| {
        for d in 1..=shells.max_distance() {
            if d >= best.load(Ordering::Relaxed) {
                return;
            }
            if shells.shell(d).iter().any(|&z| f.class(u ^ z) == to) {
                best.fetch_min(d, Ordering::Relaxed);
                return;
            }
        }
    });
    Ok(best.into_inner())
}

/// `min(d_p^f(f_i, f_j), cap)` for every pair of classes.
pub fn capped_function_distances(f: &FunctionTable, cap: u32) -> Result<Vec<Vec<u32>>> {
    let e = f.image_size();
    if e > MAX_IMAGE_SIZE {
        return Err(Error::TooLarge {
            what: "image size",
            value: e,
            limit: MAX_IMAGE_SIZE,
        });
    }
    let shells = Shells::new(f.k(), Metric::Pair, Some(cap.saturating_sub(1)));
    let merge = |mut x: Vec<u32>, y: Vec<u32>| {
        x.iter_mut().zip(y).for_each(|(a, b)| *a = (*a).min(b));
        x
    };
    let flat = (0..f.messages())
        .into_par_iter()
        .fold(
            || vec![cap; e * e],
            |mut acc, u| {
                let a = f.class(u);
                for d in 1..=shells.max_distance() {
                    for &z in shells.shell(d) {
                        let b = f.class(u ^ z);
                        if b != a && acc[a * e + b] > d {
                            acc[a * e + b] = d;
                            acc[b * e + a] = d;
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| vec![cap; e * e], merge);
    Ok((0..e)
        .map(|i| {
            (0..e)
                .map(|j| if i == j { 0 } else { flat[i * e + j] })
                .collect()
        })
        .collect())
}

/// Requirement matrix over the image of `f` in ascending value order, from
/// the exact `d_p^f`.
pub fn build_function_matrix(f: &FunctionTable, t: u32, kind: MatrixKind) -> Result<DistanceMatrix> {
    let offset = kind.offset(t);
    let dist = capped_function_distances(f, offset)?;
    Ok(DistanceMatrix::from_fn(f.image_size(), |i, j| {
        offset.saturating_sub(dist[i][j])
    }))
}

/// Requirement matrix over an explicit list of messages. Entries for equal
/// function values are zero.
pub fn build_message_matrix(
    f: &FunctionTable,
    t: u32,
    msgs: &[BinaryWord],
    kind: MatrixKind,
) -> Result<DistanceMatrix> {
    let mut seen = BTreeSet::new();
    let mut ids = Vec::with_capacity(msgs.len());
    for m in msgs {
        if m.len() != f.k() {
            return Err(Error::LengthMismatch {
                left: f.k(),
                right: m.len(),
            });
        }
        let u = m.as_u64().expect("k <= 22");
        if !seen.insert(u) {
            return Err(Error::DuplicateMessage(m.to_string()));
        }
        ids.push(u);
    }
    build_message_matrix_u64(f, t, &ids, kind)
}

pub(crate) fn build_message_matrix_u64(
    f: &FunctionTable,
    t: u32,
    ids: &[u64],
    kind: MatrixKind,
) -> Result<DistanceMatrix> {
    let offset = kind.offset(t);
    let k = f.k() as u32;
    Ok(DistanceMatrix::from_fn(ids.len(), |i, j| {
        let (a, b) = (ids[i], ids[j]);
        if f.class(a) == f.class(b) {
            0
        } else {
            offset.saturating_sub(pair_distance_u64(a, b, k))
        }
    }))
}

/// Closed-form matrices for the pair weight function indexed by position
/// in the image.
///
/// `Upper`: `2t` for neighbours, `[2t + 2 − |i − j|]⁺` otherwise.
/// `Lower`: `[2t − |i − j| − 1]⁺`, the matrix of the chain `1^i 0^{k−i}`.
pub fn closed_form_weight_matrix(k: usize, t: u32, kind: MatrixKind) -> Result<DistanceMatrix> {
    if k < 2 {
        return Err(Error::Domain(format!("needs k >= 2, got {k}")));
    }
    Ok(DistanceMatrix::from_fn(k, |i, j| {
        let gap = (j - i) as u32;
        match kind {
            MatrixKind::Upper if gap == 1 => 2 * t,
            MatrixKind::Upper => (2 * t + 2).saturating_sub(gap),
            MatrixKind::Lower => (2 * t).saturating_sub(gap + 1),
        }
    }))
}

/// The chain `u_i = 1^i 0^{k−i}` for `i = 0..k`.
pub fn weight_chain(k: usize) -> Vec<BinaryWord> {
    (0..k)
        .map(|i| BinaryWord::prefix_ones(i, k).expect("k >= 1"))
        .collect()
}

fn check_ball_length(f: &FunctionTable) -> Result<()> {
    if f.k() > MAX_BALL_LENGTH {
        return Err(Error::TooLarge {
            what: "message length",
            value: f.k(),
            limit: MAX_BALL_LENGTH,
        });
    }
    Ok(())
}

/// Function values seen within distance `rho` of `u`.
pub fn function_ball(f: &FunctionTable, u: &BinaryWord, rho: u32, metric: Metric) -> Result<BTreeSet<i64>> {
    check_ball_length(f)?;
    let center = f
        .eval_word(u)
        .map(|_| u.as_u64().expect("k <= 20"))?;
    let shells = Shells::new(f.k(), metric, Some(rho));
    Ok(shells.all().iter().map(|&z| f.eval(center ^ z)).collect())
}

/// `B_p^f(u, ρ)`.
pub fn pair_function_ball(f: &FunctionTable, u: &BinaryWord, rho: u32) -> Result<BTreeSet<i64>> {
    function_ball(f, u, rho, Metric::Pair)
}

/// First message whose radius-`rho` ball sees more than two values, with
/// the number of values seen (capped at 3).
pub fn wide_ball_witness(f: &FunctionTable, rho: u32, metric: Metric) -> Result<Option<(u64, usize)>> {
    check_ball_length(f)?;
    let shells = Shells::new(f.k(), metric, Some(rho));
    Ok((0..f.messages()).into_par_iter().find_map_first(|u| {
        let mut seen = [usize::MAX; 2];
        let mut count = 0;
        for &z in shells.all() {
            let c = f.class(u ^ z);
            if seen[..count].contains(&c) {
                continue;
            }
            if count == 2 {
                return Some((u, 3));
            }
            seen[count] = c;
            count += 1;
        }
        None
    }))
}

/// Every radius-`rho` pair ball sees at most two function values.
pub fn is_pair_locally_binary(f: &FunctionTable, rho: u32) -> Result<bool> {
    Ok(wide_ball_witness(f, rho, Metric::Pair)?.is_none())
}

/// The same predicate for Hamming balls.
pub fn is_locally_binary(f: &FunctionTable, rho: u32) -> Result<bool> {
    Ok(wide_ball_witness(f, rho, Metric::Hamming)?.is_none())
}

/// Largest value in each message's radius-`rho` pair ball.
pub(crate) fn ball_maxima(f: &FunctionTable, rho: u32) -> Result<Vec<i64>> {
    check_ball_length(f)?;
    let shells = Shells::new(f.k(), Metric::Pair, Some(rho));
    Ok((0..f.messages())
        .into_par_iter()
        .map(|u| {
            shells
                .all()
                .iter()
                .map(|&z| f.eval(u ^ z))
                .max()
                .expect("ball contains its center")
        })
        .collect())
}
