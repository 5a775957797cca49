use num_rational::Ratio;
use serde::Serialize;

use super::encoder::{
    builtin_base, encode_locally_binary, encode_pair_weight, encode_weight_distribution, Family,
    PairEncoder,
};
use super::function::{FunctionSpec, FunctionTable};
use super::matrices::{
    build_function_matrix, build_message_matrix_u64, is_pair_locally_binary, MatrixKind,
    MAX_BALL_LENGTH, MAX_IMAGE_SIZE,
};
use super::verify::{exact_redundancy, verify_fcspc, VerifyMode, MAX_EXHAUSTIVE_LENGTH, MAX_SEARCH_LENGTH};
use crate::error::{Error, Result};
use crate::irregular::{
    default_order, exact_np, greedy_construct, gv_upper_bound, plotkin_lower_bound,
    MAX_EXACT_CODEWORDS, MAX_GREEDY_LENGTH,
};
use crate::pairmetric::{pair_distance_u64, BinaryWord, Metric};

/// One bound on the optimal redundancy and where it comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub source: String,
    /// Integer form: a ceiling for lower bounds, a floor for upper bounds.
    pub value: u64,
    /// The unrounded value when it is not an integer.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl Bound {
    fn int(source: &str, value: u64) -> Self {
        Self {
            source: source.to_string(),
            value,
            exact: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Achieved {
    pub family: Family,
    pub r: usize,
    /// `None` when the message space is too large for exhaustive checking.
    pub verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RedundancyReport {
    pub k: usize,
    pub t: u32,
    pub function: String,
    pub image_size: usize,
    pub lower: Vec<Bound>,
    pub upper: Vec<Bound>,
    pub achieved: Vec<Achieved>,
    pub best_lower: u64,
    pub best_upper: Option<u64>,
    pub consistent: bool,
    /// Bounds proved for the requested family alone.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyBounds>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyBounds {
    pub family: Family,
    pub lower: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub family: Option<Family>,
    /// Message subset for the lower-bound matrix; heuristic when `None`.
    pub subset: Option<Vec<BinaryWord>>,
    /// Run exact searches where the guards allow.
    pub exact: bool,
    pub r_max: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            family: None,
            subset: None,
            exact: false,
            r_max: 16,
            seed: 0,
        }
    }
}

/// `(20t³ − 20t) / (9(t + 1)²)`.
pub fn weight_plotkin_rational(t: u32) -> Ratio<u64> {
    let t = u64::from(t);
    Ratio::new(20 * t * t * t - 20 * t, 9 * (t + 1) * (t + 1))
}

/// `(4t − 4) / (1 − 2√(ln(2t − 1)/(2t − 1)))`.
pub fn weight_asymptotic_upper(t: u32) -> f64 {
    let x = f64::from(2 * t - 1);
    (4.0 * f64::from(t) - 4.0) / (1.0 - 2.0 * (x.ln() / x).sqrt())
}

/// Whether the asymptotic pair weight bound applies to `(k, t)`.
pub fn weight_asymptotic_applies(k: usize, t: u32) -> bool {
    let limit = (2 * t as u64 - 1).pow(2);
    t >= 6 && k >= 2 && k as u64 <= limit
}

/// One representative per function value (up to `limit` values), each
/// chosen to be close in pair distance to those already picked.
pub fn heuristic_subset(f: &FunctionTable, limit: usize) -> Vec<u64> {
    let k = f.k() as u32;
    let groups = f.preimages();
    let mut chosen: Vec<u64> = Vec::new();
    for group in groups.iter().take(limit) {
        let best = group
            .iter()
            .copied()
            .min_by_key(|&u| {
                chosen
                    .iter()
                    .map(|&c| u64::from(pair_distance_u64(u, c, k)))
                    .sum::<u64>()
            })
            .expect("classes are nonempty");
        chosen.push(best);
    }
    chosen
}

fn construct_family(f: &FunctionTable, t: u32) -> Result<Option<PairEncoder>> {
    match f.spec() {
        FunctionSpec::PairWeight if builtin_base(t).is_some() => {
            encode_pair_weight(f.k(), t, None).map(Some)
        }
        FunctionSpec::WeightDistribution { period } => {
            match encode_weight_distribution(f.k(), t, *period) {
                Ok(enc) => Ok(Some(enc)),
                Err(Error::Domain(_)) => Ok(None),
                Err(e) => Err(e),
            }
        }
        _ => Ok(None),
    }
}

/// Collects every bound that applies to `f` at `t`.
pub fn redundancy_report(f: &FunctionTable, t: u32, opts: &ReportOptions) -> Result<RedundancyReport> {
    if t == 0 {
        return Err(Error::Domain("t must be at least 1".into()));
    }
    let k = f.k();
    let e = f.image_size();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut achieved = Vec::new();
    let mut notes = Vec::new();

    if e < 2 {
        notes.push("constant function: no parity needed".into());
        upper.push(Bound::int("constant_function", 0));
    } else {
        lower.push(Bound::int("generic", u64::from(2 * t - 2)));

        let ids: Vec<u64> = match &opts.subset {
            Some(words) => words
                .iter()
                .map(|w| {
                    f.eval_word(w)?;
                    Ok(w.as_u64().expect("k <= 22"))
                })
                .collect::<Result<_>>()?,
            None => heuristic_subset(f, MAX_EXACT_CODEWORDS),
        };
        let d1 = build_message_matrix_u64(f, t, &ids, MatrixKind::Lower)?;
        let plotkin = plotkin_lower_bound(&d1);
        lower.push(Bound {
            source: "subset_plotkin".into(),
            value: plotkin.ceiling,
            exact: (!plotkin.rational.is_integer()).then(|| plotkin.rational.to_string()),
        });
        if opts.exact && d1.size() <= MAX_EXACT_CODEWORDS {
            let np = exact_np(&d1, Metric::Pair, opts.r_max.min(crate::irregular::MAX_EXACT_LENGTH))?;
            lower.push(Bound::int("subset_exact", np.value as u64));
        }

        if e <= MAX_IMAGE_SIZE {
            let d2 = build_function_matrix(f, t, MatrixKind::Upper)?;
            let order = default_order(&d2);
            let gv = gv_upper_bound(&d2, &order, Metric::Pair)?;
            upper.push(Bound::int("function_matrix_gv", gv));
            // shorten greedily while a code is still found
            let mut shortest = None;
            let mut r = gv as usize;
            while (1..=MAX_GREEDY_LENGTH).contains(&r) {
                match greedy_construct(&d2, r, &order, Metric::Pair, opts.seed) {
                    Ok(_) => shortest = Some(r),
                    Err(Error::Infeasible { .. }) => break,
                    Err(e) => return Err(e),
                }
                r -= 1;
            }
            if let Some(r) = shortest {
                upper.push(Bound::int("function_matrix_greedy", r as u64));
            }
            if opts.exact && d2.size() <= MAX_EXACT_CODEWORDS {
                let np = exact_np(&d2, Metric::Pair, opts.r_max.min(crate::irregular::MAX_EXACT_LENGTH))?;
                upper.push(Bound::int("function_matrix_exact", np.value as u64));
            }
        } else {
            notes.push(format!("image size {e} too large for the function matrix"));
        }

        match f.spec() {
            FunctionSpec::PairWeight => {
                lower.push(Bound::int("pair_weight_neighbours", u64::from(2 * t - 1)));
                if k as u32 > t {
                    let q = weight_plotkin_rational(t);
                    lower.push(Bound {
                        source: "pair_weight_plotkin".into(),
                        value: q.ceil().to_integer(),
                        exact: Some(q.to_string()),
                    });
                }
                if weight_asymptotic_applies(k, t) {
                    let x = weight_asymptotic_upper(t);
                    upper.push(Bound {
                        source: "pair_weight_asymptotic".into(),
                        value: x.floor() as u64,
                        exact: Some(format!("{x:.6}")),
                    });
                }
                if let Some(base) = builtin_base(t) {
                    upper.push(Bound::int("pair_weight_construction", base[0].len() as u64));
                }
            }
            FunctionSpec::WeightDistribution { period } => {
                if (k as u64 + 1).is_multiple_of(*period) && *period >= u64::from(2 * t + 1) {
                    upper.push(Bound::int("distribution_construction", u64::from(2 * t)));
                } else {
                    notes.push(format!(
                        "T = {period} does not divide k + 1 or is below 2t + 1; no construction"
                    ));
                }
            }
            _ => {}
        }

        if k <= MAX_BALL_LENGTH && is_pair_locally_binary(f, 2 * t)? {
            upper.push(Bound::int("locally_binary_construction", u64::from(2 * t - 1)));
            achieved.push(achieve(encode_locally_binary(f, t)?, f, t)?);
        }
        if let Some(enc) = construct_family(f, t)? {
            achieved.push(achieve(enc, f, t)?);
        }
        if opts.exact && k <= MAX_SEARCH_LENGTH {
            let res = exact_redundancy(f, t, opts.r_max.min(super::verify::MAX_SEARCH_REDUNDANCY))?;
            lower.push(Bound::int("exact_search", res.value as u64));
            upper.push(Bound::int("exact_search", res.value as u64));
        }
    }

    let best_lower = lower.iter().map(|b| b.value).max().unwrap_or(0);
    let best_upper = upper.iter().map(|b| b.value).min();
    if t == 1 && matches!(f.spec(), FunctionSpec::PairWeight) && best_upper == Some(2) && best_lower == 1 {
        notes.push("whether the optimum is 1 or 2 is not settled by these bounds".into());
    }
    let family = opts
        .family
        .map(|fam| family_bounds(fam, f, t))
        .transpose()?;
    Ok(RedundancyReport {
        family,
        k,
        t,
        function: f.spec().to_string(),
        image_size: e,
        consistent: best_upper.is_none_or(|u| best_lower <= u),
        lower,
        upper,
        achieved,
        best_lower,
        best_upper,
        notes,
    })
}

/// Lower and upper bounds that hold for every function of a family.
pub fn family_bounds(family: Family, f: &FunctionTable, t: u32) -> Result<FamilyBounds> {
    let k = f.k();
    let generic = u64::from(2 * t - 2);
    let (lower, upper) = match (family, f.spec()) {
        (Family::Weight, FunctionSpec::PairWeight) => {
            let mut lower = u64::from(2 * t - 1);
            if k as u32 > t {
                lower = lower.max(weight_plotkin_rational(t).ceil().to_integer());
            }
            let construction = builtin_base(t).map(|b| b[0].len() as u64);
            let asymptotic = weight_asymptotic_applies(k, t)
                .then(|| weight_asymptotic_upper(t).floor() as u64);
            let upper = match (construction, asymptotic) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            (lower, upper)
        }
        (Family::Dist, FunctionSpec::WeightDistribution { period }) => {
            let valid = (k as u64 + 1).is_multiple_of(*period) && *period >= u64::from(2 * t + 1);
            (generic, valid.then_some(u64::from(2 * t)))
        }
        (Family::Locally, _) => {
            if !is_pair_locally_binary(f, 2 * t)? {
                return Err(Error::Domain(format!(
                    "function is not {}-pair-locally binary",
                    2 * t
                )));
            }
            (generic, Some(u64::from(2 * t - 1)))
        }
        (Family::Class | Family::Exact, _) => (generic, None),
        (fam, spec) => {
            return Err(Error::Domain(format!(
                "family {fam} does not apply to function {spec}"
            )))
        }
    };
    Ok(FamilyBounds {
        family,
        lower,
        upper,
    })
}

fn achieve(enc: PairEncoder, f: &FunctionTable, t: u32) -> Result<Achieved> {
    let verified = if f.k() <= MAX_EXHAUSTIVE_LENGTH {
        Some(verify_fcspc(&enc, f, t, VerifyMode::Exhaustive)?.is_valid())
    } else {
        None
    };
    Ok(Achieved {
        family: enc.family,
        r: enc.r,
        verified,
    })
}

/// One row of the comparison against classical symbol-pair codes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub k: usize,
    pub t: u32,
    /// `⌊t/2⌋ · log₂(k + 2t − 1)`.
    pub classical: f64,
    pub locally_binary: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_weight: Option<f64>,
    pub distribution: u64,
    pub notes: Vec<String>,
}

pub fn classical_lower(k: usize, t: u32) -> f64 {
    f64::from(t / 2) * ((k as f64) + 2.0 * f64::from(t) - 1.0).log2()
}

pub fn comparison_row(k: usize, t: u32) -> Result<ComparisonRow> {
    if k < 2 {
        return Err(Error::Domain(format!("needs k >= 2, got {k}")));
    }
    if t == 0 {
        return Err(Error::Domain("t must be at least 1".into()));
    }
    let mut notes = Vec::new();
    if t == 1 {
        notes.push("classical bound is vacuous at t = 1".into());
    }
    let pair_weight = weight_asymptotic_applies(k, t).then(|| weight_asymptotic_upper(t));
    if pair_weight.is_none() {
        notes.push("pair weight bound needs t >= 6 and k <= (2t - 1)^2".into());
    }
    Ok(ComparisonRow {
        k,
        t,
        classical: classical_lower(k, t),
        locally_binary: u64::from(2 * t - 1),
        pair_weight,
        distribution: u64::from(2 * t),
        notes,
    })
}
