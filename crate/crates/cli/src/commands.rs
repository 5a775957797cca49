use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use paircode::channel::{exhaustive_round_trip, round_trip_experiment, ChannelConfig, ErrorMode};
use paircode::counting::{ball_size, enumerate_pair_ball, MAX_ENUMERATION_LENGTH};
use paircode::fcspc::{
    build_function_matrix, build_message_matrix, closed_form_weight_matrix, comparison_row,
    encode_from_function_matrix, encode_locally_binary, encode_pair_weight,
    encode_weight_distribution, exact_redundancy, pair_weight_fn, redundancy_report, verify_fcspc,
    weight_chain, weight_distribution_fn, Family, FunctionSpec, FunctionTable, MatrixKind,
    PairEncoder, ReportOptions, Verdict, VerifyMode, MAX_EXHAUSTIVE_LENGTH,
};
use paircode::irregular::{
    default_order, exact_np, greedy_construct, gv_upper_bound, np_uniform_upper,
    plotkin_lower_bound, CodeWitness, NpResult, PlotkinBound, UniformUpper, MAX_GREEDY_LENGTH,
};
use paircode::pairmetric::{hamming_distance, pair_distance, pair_read, pair_weight, parse_code};
use paircode::{BinaryWord, DistanceMatrix, Metric};

use crate::render;
use crate::{
    BallArgs, BoundsArgs, CompareArgs, ConstructArgs, FamilyArg, Format, MatrixArgs, MetricArgs,
    ModeArg, ReportArgs, SimulateArgs, Status, VerifyArgs,
};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn word(s: &str) -> Result<BinaryWord> {
    s.parse().with_context(|| format!("bad word {s:?}"))
}

/// `weight`, `dist:T`, `indicator:w1,..` or `table:PATH`.
fn function_table(spec: &str, k: Option<usize>) -> Result<FunctionTable> {
    if let Some(path) = spec.strip_prefix("table:") {
        let f = FunctionTable::parse_table(&read(Path::new(path))?)?;
        if let Some(k) = k {
            if f.k() != k {
                bail!("function table has k = {}, expected {k}", f.k());
            }
        }
        return Ok(f);
    }
    let parsed: FunctionSpec = spec.parse()?;
    let k = match (&parsed, k) {
        (_, Some(k)) => k,
        (FunctionSpec::CodeIndicator { code }, None) => code.first().map_or(0, BinaryWord::len),
        _ => bail!("message length needed for function {spec:?}"),
    };
    Ok(FunctionTable::from_spec(&parsed, k)?)
}

fn family_of(arg: FamilyArg) -> Family {
    match arg {
        FamilyArg::Weight => Family::Weight,
        FamilyArg::Dist => Family::Dist,
        FamilyArg::Locally => Family::Locally,
        FamilyArg::Class => Family::Class,
        FamilyArg::Exact => Family::Exact,
    }
}

/// The function a family is built for.
fn family_function(
    family: FamilyArg,
    k: usize,
    period: Option<u64>,
    function: Option<&str>,
) -> Result<FunctionTable> {
    match family {
        FamilyArg::Weight => Ok(pair_weight_fn(k)?),
        FamilyArg::Dist => {
            let period = period.ok_or_else(|| anyhow!("--T is required for the dist family"))?;
            Ok(weight_distribution_fn(k, period)?)
        }
        _ => {
            let spec = function.ok_or_else(|| anyhow!("--function is required for this family"))?;
            function_table(spec, Some(k))
        }
    }
}

fn load_encoder(path: &Path) -> Result<PairEncoder> {
    PairEncoder::from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn encoder_function(enc: &PairEncoder, spec: Option<&str>) -> Result<FunctionTable> {
    match spec {
        Some(s) => function_table(s, Some(enc.k)),
        None => FunctionTable::from_spec(&enc.function, enc.k)
            .context("encoder has no built-in function; pass --function"),
    }
}

#[derive(Serialize)]
struct MetricOut {
    x: String,
    y: String,
    hamming: usize,
    pair: usize,
    pair_read_x: String,
    pair_read_y: String,
}

#[derive(Serialize)]
struct WeightOut {
    word: String,
    pair_weight: usize,
}

pub fn metric(a: &MetricArgs, fmt: Format) -> Result<Status> {
    if let Some(w) = &a.weight {
        let x = word(w)?;
        let out = WeightOut {
            word: x.to_string(),
            pair_weight: pair_weight(&x),
        };
        match fmt {
            Format::Json => render::json(&out)?,
            Format::Csv => render::csv_rows(
                &["word", "pair_weight"],
                &[vec![out.word, out.pair_weight.to_string()]],
            )?,
            Format::Human => println!("w_p({}) = {}", out.word, out.pair_weight),
        }
        return Ok(Status::Success);
    }
    let (Some(xs), Some(ys)) = (&a.x, &a.y) else {
        bail!("pass --x and --y, or --weight");
    };
    let (x, y) = (word(xs)?, word(ys)?);
    let out = MetricOut {
        hamming: hamming_distance(&x, &y)?,
        pair: pair_distance(&x, &y)?,
        pair_read_x: pair_read(&x).to_string(),
        pair_read_y: pair_read(&y).to_string(),
        x: x.to_string(),
        y: y.to_string(),
    };
    match fmt {
        Format::Json => render::json(&out)?,
        Format::Csv => render::csv_rows(
            &["x", "y", "hamming", "pair", "pair_read_x", "pair_read_y"],
            &[vec![
                out.x,
                out.y,
                out.hamming.to_string(),
                out.pair.to_string(),
                out.pair_read_x,
                out.pair_read_y,
            ]],
        )?,
        Format::Human => {
            println!("d_H = {}", out.hamming);
            println!("d_p = {}", out.pair);
            println!("pi(x) = {}", out.pair_read_x);
            println!("pi(y) = {}", out.pair_read_y);
        }
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct BallOut {
    n: u64,
    t: u64,
    formula: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
}

pub fn ball(a: &BallArgs, fmt: Format) -> Result<Status> {
    let formula = ball_size(a.n, a.t)?;
    let oracle = if a.oracle {
        if a.n as usize > MAX_ENUMERATION_LENGTH {
            bail!("--oracle needs n <= {MAX_ENUMERATION_LENGTH}");
        }
        let center = BinaryWord::zeros(a.n as usize)?;
        Some(enumerate_pair_ball(&center, a.t)?.len().to_string())
    } else {
        None
    };
    let agree = oracle.as_ref().map(|o| *o == formula.to_string());
    let out = BallOut {
        n: a.n,
        t: a.t,
        formula: formula.to_string(),
        oracle,
        agree,
    };
    match fmt {
        Format::Json => render::json(&out)?,
        Format::Csv => render::csv_rows(
            &["n", "t", "formula", "oracle"],
            &[vec![
                out.n.to_string(),
                out.t.to_string(),
                out.formula.clone(),
                out.oracle.clone().unwrap_or_default(),
            ]],
        )?,
        Format::Human => {
            println!("B({}, {}) = {}", out.n, out.t, out.formula);
            if let Some(o) = &out.oracle {
                println!("enumerated  = {o}");
            }
        }
    }
    Ok(if agree == Some(false) {
        Status::Negative
    } else {
        Status::Success
    })
}

#[derive(Serialize)]
struct DmaxOut {
    m: usize,
    d: u32,
    upper: UniformUpper,
}

#[derive(Serialize)]
struct BoundsOut {
    m: usize,
    metric: Metric,
    #[serde(skip_serializing_if = "Option::is_none")]
    plotkin: Option<PlotkinBound>,
    gv: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    greedy: Option<CodeWitness>,
    dmax: DmaxOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<NpResult>,
}

pub fn bounds(a: &BoundsArgs, fmt: Format) -> Result<Status> {
    let metric: Metric = a.metric.parse()?;
    let d = match (&a.matrix, &a.uniform) {
        (Some(path), _) => DistanceMatrix::parse(&read(path)?)?,
        (None, Some(v)) => DistanceMatrix::uniform(v[0] as usize, v[1]),
        (None, None) => bail!("pass --matrix or --uniform"),
    };
    let order = default_order(&d);
    let gv = gv_upper_bound(&d, &order, metric)?;
    let greedy = if gv >= 1 && gv as usize <= MAX_GREEDY_LENGTH {
        Some(greedy_construct(&d, gv as usize, &order, metric, a.seed)?)
    } else {
        None
    };
    let dmax = DmaxOut {
        m: d.size(),
        d: d.max_entry(),
        upper: np_uniform_upper(d.size() as u64, u64::from(d.max_entry())),
    };
    let exact = if a.exact {
        Some(exact_np(&d, metric, a.r_max)?)
    } else {
        None
    };
    let out = BoundsOut {
        m: d.size(),
        metric,
        plotkin: (metric == Metric::Pair).then(|| plotkin_lower_bound(&d)),
        gv,
        greedy,
        dmax,
        exact,
    };
    match fmt {
        Format::Json => render::json(&out)?,
        Format::Csv | Format::Human => {
            let mut rows = Vec::new();
            if let Some(p) = &out.plotkin {
                rows.push(vec!["plotkin_lower".into(), p.ceiling.to_string(), p.rational.to_string()]);
            }
            rows.push(vec!["gv_upper".into(), out.gv.to_string(), String::new()]);
            if let Some(v) = out.dmax.upper.value() {
                rows.push(vec![
                    "dmax_uniform_upper".into(),
                    v.to_string(),
                    format!("M={} D={}", out.dmax.m, out.dmax.d),
                ]);
            }
            if let Some(e) = &out.exact {
                let words: Vec<String> = e.witness.words.iter().map(ToString::to_string).collect();
                rows.push(vec!["exact".into(), e.value.to_string(), words.join(" ")]);
            }
            if fmt == Format::Csv {
                render::csv_rows(&["bound", "value", "detail"], &rows)?;
            } else {
                println!("{} x {} matrix, {} metric", out.m, out.m, out.metric);
                render::table(&["bound", "value", "detail"], &rows);
            }
        }
    }
    Ok(Status::Success)
}

#[derive(Serialize)]
struct ConstructOut<'a> {
    family: Family,
    k: usize,
    r: usize,
    t: u32,
    function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    encoder: Option<&'a PairEncoder>,
}

pub fn construct(a: &ConstructArgs, fmt: Format) -> Result<Status> {
    let enc = match a.family {
        FamilyArg::Weight => {
            let base = a.base.as_deref().map(|p| read(p).and_then(|s| Ok(parse_code(&s)?))).transpose()?;
            encode_pair_weight(a.k, a.t, base.as_deref())?
        }
        FamilyArg::Dist => {
            let period = a.period.ok_or_else(|| anyhow!("--T is required for the dist family"))?;
            encode_weight_distribution(a.k, a.t, period)?
        }
        FamilyArg::Locally => {
            let f = family_function(a.family, a.k, a.period, a.function.as_deref())?;
            encode_locally_binary(&f, a.t)?
        }
        FamilyArg::Class => {
            let f = family_function(a.family, a.k, a.period, a.function.as_deref())?;
            encode_from_function_matrix(&f, a.t, a.exact, a.seed)?
        }
        FamilyArg::Exact => {
            let f = family_function(a.family, a.k, a.period, a.function.as_deref())?;
            exact_redundancy(&f, a.t, a.r_max)?.encoder
        }
    };
    if let Some(path) = &a.out {
        fs::write(path, enc.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = ConstructOut {
        family: enc.family,
        k: enc.k,
        r: enc.r,
        t: enc.t,
        function: enc.function.to_string(),
        out: a.out.as_ref().map(|p| p.display().to_string()),
        encoder: a.out.is_none().then_some(&enc),
    };
    match fmt {
        Format::Json => render::json(&summary)?,
        Format::Csv => render::csv_rows(
            &["family", "k", "r", "t", "function"],
            &[vec![
                summary.family.to_string(),
                summary.k.to_string(),
                summary.r.to_string(),
                summary.t.to_string(),
                summary.function.clone(),
            ]],
        )?,
        Format::Human => {
            println!(
                "{} encoder for {}: k = {}, t = {}, r = {}",
                summary.family, summary.function, summary.k, summary.t, summary.r
            );
            if let Some(p) = &summary.out {
                println!("written to {p}");
            }
        }
    }
    Ok(Status::Success)
}

pub fn verify(a: &VerifyArgs, fmt: Format) -> Result<Status> {
    let enc = load_encoder(&a.enc)?;
    let f = encoder_function(&enc, a.function.as_deref())?;
    let t = a.t.unwrap_or(enc.t);
    let mode = match a.samples {
        Some(samples) => VerifyMode::Sampled {
            samples,
            seed: a.seed,
        },
        None if f.k() <= MAX_EXHAUSTIVE_LENGTH => VerifyMode::Exhaustive,
        None => VerifyMode::Sampled {
            samples: 100_000,
            seed: a.seed,
        },
    };
    let verdict = verify_fcspc(&enc, &f, t, mode)?;
    match fmt {
        Format::Json => render::json(&verdict)?,
        Format::Csv => {
            let (status, detail) = verdict_cells(&verdict);
            render::csv_rows(&["status", "detail"], &[vec![status, detail]])?;
        }
        Format::Human => {
            let (status, detail) = verdict_cells(&verdict);
            println!("{status}: {detail}");
        }
    }
    Ok(match verdict {
        Verdict::Violated { .. } => Status::Negative,
        _ => Status::Success,
    })
}

fn verdict_cells(v: &Verdict) -> (String, String) {
    match v {
        Verdict::Valid { pairs } => ("valid".into(), format!("{pairs} message pairs checked")),
        Verdict::NoViolationFound { samples } => (
            "no_violation_found".into(),
            format!("no violation found in {samples} samples"),
        ),
        Verdict::Violated { counterexample: c } => (
            "violated".into(),
            format!(
                "u1 = {} (f = {}), u2 = {} (f = {}): pair distance {} < {}",
                c.u1, c.f1, c.u2, c.f2, c.distance, c.required
            ),
        ),
    }
}

pub fn report(a: &ReportArgs, fmt: Format) -> Result<Status> {
    let f = family_function(a.family, a.k, a.period, a.function.as_deref())?;
    let subset = a
        .subset
        .as_deref()
        .map(|p| read(p).and_then(|s| Ok(parse_code(&s)?)))
        .transpose()?;
    let opts = ReportOptions {
        family: Some(family_of(a.family)),
        subset,
        exact: a.exact,
        r_max: a.r_max,
        seed: a.seed,
    };
    let rep = redundancy_report(&f, a.t, &opts)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (side, list) in [("lower", &rep.lower), ("upper", &rep.upper)] {
        for b in list {
            rows.push(vec![
                side.into(),
                b.source.clone(),
                b.value.to_string(),
                b.exact.clone().unwrap_or_default(),
            ]);
        }
    }
    if let Some(fam) = &rep.family {
        rows.push(vec!["family_lower".into(), fam.family.to_string(), fam.lower.to_string(), String::new()]);
        if let Some(u) = fam.upper {
            rows.push(vec!["family_upper".into(), fam.family.to_string(), u.to_string(), String::new()]);
        }
    }
    for ach in &rep.achieved {
        let verified = match ach.verified {
            Some(true) => "verified",
            Some(false) => "FAILED",
            None => "unchecked",
        };
        rows.push(vec!["achieved".into(), ach.family.to_string(), ach.r.to_string(), verified.into()]);
    }
    match fmt {
        Format::Json => render::json(&rep)?,
        Format::Csv => render::csv_rows(&["side", "source", "value", "detail"], &rows)?,
        Format::Human => {
            println!(
                "{}: k = {}, t = {}, |Im f| = {}",
                rep.function, rep.k, rep.t, rep.image_size
            );
            render::table(&["side", "source", "value", "detail"], &rows);
            let upper = rep.best_upper.map_or("none".to_string(), |u| u.to_string());
            println!("best: {} <= r <= {upper}", rep.best_lower);
            for n in &rep.notes {
                println!("note: {n}");
            }
        }
    }
    Ok(if rep.consistent && rep.achieved.iter().all(|a| a.verified != Some(false)) {
        Status::Success
    } else {
        Status::Negative
    })
}

pub fn matrix(a: &MatrixArgs, fmt: Format) -> Result<Status> {
    let kind: MatrixKind = a.kind.parse()?;
    let d = if a.closed_form {
        closed_form_weight_matrix(a.k, a.t, kind)?
    } else {
        let f = function_table(&a.function, Some(a.k))?;
        if a.chain {
            build_message_matrix(&f, a.t, &weight_chain(a.k), kind)?
        } else if let Some(path) = &a.messages {
            build_message_matrix(&f, a.t, &parse_code(&read(path)?)?, kind)?
        } else {
            build_function_matrix(&f, a.t, kind)?
        }
    };
    match fmt {
        Format::Json => println!("{}", d.to_json()),
        Format::Csv => print!("{}", d.to_csv()),
        Format::Human => print!("{d}"),
    }
    Ok(Status::Success)
}

pub fn compare(a: &CompareArgs, fmt: Format) -> Result<Status> {
    let row = comparison_row(a.k, a.t)?;
    let pw = row.pair_weight.map(|x| format!("{x:.3}")).unwrap_or_default();
    match fmt {
        Format::Json => render::json(&row)?,
        Format::Csv => render::csv_rows(
            &["k", "t", "classical", "locally_binary", "pair_weight", "distribution"],
            &[vec![
                row.k.to_string(),
                row.t.to_string(),
                format!("{:.6}", row.classical),
                row.locally_binary.to_string(),
                pw,
                row.distribution.to_string(),
            ]],
        )?,
        Format::Human => {
            println!("k = {}, t = {}", row.k, row.t);
            let classical = format!("{:.3}", row.classical);
            let na = || "n/a".to_string();
            render::table(
                &["function", "classical lower", "FCSPC upper"],
                &[
                    vec![
                        "2t-pair-locally binary".into(),
                        classical.clone(),
                        row.locally_binary.to_string(),
                    ],
                    vec![
                        "pair weight".into(),
                        classical.clone(),
                        row.pair_weight.map(|x| format!("{x:.3}")).unwrap_or_else(na),
                    ],
                    vec![
                        "pair weight distribution".into(),
                        classical,
                        row.distribution.to_string(),
                    ],
                ],
            );
            for n in &row.notes {
                println!("note: {n}");
            }
        }
    }
    Ok(Status::Success)
}

pub fn simulate(a: &SimulateArgs, fmt: Format) -> Result<Status> {
    let enc = load_encoder(&a.enc)?;
    let f = encoder_function(&enc, a.function.as_deref())?;
    let t = a.t.unwrap_or(enc.t as usize);
    let started = Instant::now();
    let stats = if a.exhaustive {
        exhaustive_round_trip(&f, &enc, t)?
    } else {
        let cfg = ChannelConfig {
            t,
            mode: match a.mode {
                ModeArg::Exactly => ErrorMode::Exactly,
                ModeArg::UpTo => ErrorMode::UpTo,
            },
            seed: a.seed.ok_or_else(|| anyhow!("--seed is required"))?,
        };
        round_trip_experiment(&f, &enc, &cfg, a.trials.unwrap_or(0))?
    };
    let elapsed = started.elapsed();
    match fmt {
        Format::Json => render::json(&stats)?,
        Format::Csv => render::csv_rows(
            &["trials", "successes", "ambiguous", "t", "k", "r", "family", "seed"],
            &[vec![
                stats.trials.to_string(),
                stats.successes.to_string(),
                stats.ambiguous.to_string(),
                stats.t.to_string(),
                stats.k.to_string(),
                stats.r.to_string(),
                stats.family.to_string(),
                stats.seed.to_string(),
            ]],
        )?,
        Format::Human => {
            let rate = stats
                .success_rate()
                .map_or("n/a".to_string(), |r| format!("{:.4}", r));
            println!(
                "{} of {} recovered (rate {rate}), {} ambiguous, t = {}, {:.3} s",
                stats.successes,
                stats.trials,
                stats.ambiguous,
                stats.t,
                elapsed.as_secs_f64()
            );
        }
    }
    let within_budget = t <= enc.t as usize;
    Ok(if within_budget && stats.successes < stats.trials {
        Status::Negative
    } else {
        Status::Success
    })
}
