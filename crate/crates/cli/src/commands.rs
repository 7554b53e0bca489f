//! Command bodies. Each returns the full report text so that output is
//! assembled in one deterministic pass.

use std::fmt::Write as _;
use std::path::Path;

use keane::dimension::{dim_bounds, generate_rule_with, generic_analysis, Direction, DEFAULT_DIGIT_BUDGET, DEFAULT_N1};
use keane::iet::step_budget_from_env;
use keane::keane::{admissible, return_times, KeaneIet, ParamSeq, RuleTag, Verdict};
use keane::measure::{default_truncation, lemma_suite, Measure, MeasureModel};
use keane::num::{fmt_rational, fmt_sci, parse_rational};
use keane::oracle::induction_oracle;
use keane::recurrence::{appendix_params, recurrence_stat, rng_from_seed, sample_point};
use keane::KeaneError;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::config::{Command, Format, SeqSource};
use crate::{EXIT_BUDGET, EXIT_FAIL, EXIT_USAGE};

pub struct Output {
    pub text: String,
    /// Extra human-readable lines for standard error.
    pub note: Option<String>,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, note: None, code: 0 }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<KeaneError> for CliError {
    fn from(e: KeaneError) -> Self {
        let code = match e {
            KeaneError::Budget { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        let mut message = e.to_string();
        if code == EXIT_BUDGET {
            message.push_str("; try a smaller level or depth, or raise KEANE_STEP_BUDGET");
        }
        CliError { code, message }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: msg.into() }
}

type Res<T> = Result<T, CliError>;

/// Resolves the short rule names accepted on the command line.
pub fn parse_rule(name: &str, alpha: Option<&str>) -> Res<RuleTag> {
    let need_alpha = || -> Res<_> {
        let a = alpha.ok_or_else(|| usage(format!("rule {name} needs --alpha")))?;
        Ok(parse_rational(a)?)
    };
    match name {
        "alpha2" => return Ok(RuleTag::Alpha2(need_alpha()?)),
        "alpha3" => return Ok(RuleTag::Alpha3(need_alpha()?)),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("flip") {
        let cs: Vec<char> = rest.chars().collect();
        if cs.len() == 2 {
            return Ok(format!("flip({},{})", cs[0], cs[1]).parse()?);
        }
    }
    Ok(name.parse()?)
}

fn read_seq(path: &Path) -> Res<ParamSeq> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(ParamSeq::from_json(&text)?)
}

/// The sequence named by `source`, generated with `depth` pairs when it
/// comes from a rule.
fn load_seq(source: &SeqSource, default_rule: &str, depth: usize) -> Res<ParamSeq> {
    if let Some(path) = &source.file {
        return read_seq(path);
    }
    let rule = parse_rule(source.rule.as_deref().unwrap_or(default_rule), source.alpha.as_deref())?;
    if rule == RuleTag::Explicit {
        return Err(usage("rule explicit needs --file"));
    }
    Ok(generate_rule_with(&rule, depth, source.n1.unwrap_or(DEFAULT_N1), DEFAULT_DIGIT_BUDGET)?)
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn run(command: Command) -> Res<Output> {
    match command {
        Command::Params { source, depth, out } => params(&source, depth, out.as_deref()),
        Command::Verify { source, k_max, r, format, digits } => verify(&source, k_max, r, format, digits),
        Command::Dimension { source, direction, k_max, format, digits } => dimension(&source, direction, k_max, format, digits),
        Command::Generic { source, k, eps, format } => generic(&source, k, &eps, format),
        Command::Recurrence { n1, file, depth, level, horizon, alpha, samples, seed, format, digits } => {
            recurrence(n1, file.as_deref(), depth, level, horizon, &alpha, samples, seed, format, digits)
        }
    }
}

fn params(source: &SeqSource, depth: Option<usize>, out: Option<&Path>) -> Res<Output> {
    let seq = if source.file.is_some() {
        let seq = load_seq(source, "explicit", 0)?;
        match depth {
            Some(k) if k < seq.depth() => seq.truncated(k)?,
            _ => seq,
        }
    } else {
        let k = depth.ok_or_else(|| usage("params needs --K when generating from a rule"))?;
        load_seq(source, "minimal-admissible", k)?
    };
    let text = to_text(&serde_json::to_value(&seq).expect("sequence serializes"));
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(text)),
    }
}

fn verify(source: &SeqSource, k_max: usize, r: usize, format: Format, digits: usize) -> Res<Output> {
    let seq = load_seq(source, "minimal-admissible", k_max + r + 1)?;
    let budget = step_budget_from_env()?;
    let adm = admissible(&seq, false);
    let suite = lemma_suite(&seq, k_max, r)?;

    // The oracle runs at the levels whose towers stay small.
    let mut oracle = Vec::new();
    for k in 1..=seq.depth().min(3) {
        let b2 = return_times(&seq, k)?.get(2).to_u64();
        if !matches!(b2, Some(x) if x <= 1_000_000) {
            break;
        }
        oracle.push(induction_oracle(&seq, k, budget)?);
    }
    let oracle_ok = oracle.iter().all(|o| o.matches());
    let fails = suite.count(Verdict::Fail);
    let code = if fails > 0 || !oracle_ok { EXIT_FAIL } else { 0 };

    let summary = format!(
        "lemmas: {} PASS, {} INCONCLUSIVE, {} FAIL of {}; oracle levels {}: {}; admissibility: {}",
        suite.count(Verdict::Pass),
        suite.count(Verdict::Inconclusive),
        fails,
        suite.rows.len(),
        oracle.iter().map(|o| o.level.to_string()).collect::<Vec<_>>().join(","),
        if oracle_ok { "match" } else { "MISMATCH" },
        adm.worst(),
    );
    let text = match format {
        Format::Csv => suite.to_csv(digits),
        Format::Json => {
            let rows: Vec<Value> = suite
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "lemma_id": r.lemma_id,
                        "k": r.k,
                        "relation": r.relation.symbol(),
                        "verdict": r.verdict.to_string(),
                        "bound": fmt_rational(&r.bound),
                        "enclosure_lo": fmt_sci(&r.lo, digits, false),
                        "enclosure_hi": fmt_sci(&r.hi, digits, true),
                        "margin": fmt_sci(&r.margin, digits, false),
                    })
                })
                .collect();
            let oracle: Vec<Value> = oracle
                .iter()
                .map(|o| {
                    json!({
                        "level": o.level,
                        "match": o.matches(),
                        "return_times": o.observed_return_times,
                        "landing": o.observed_landing,
                        "relative_landing": o.observed_relative,
                    })
                })
                .collect();
            let adm: Vec<Value> = adm
                .entries
                .iter()
                .map(|e| json!({"k": e.k, "condition": e.condition, "verdict": e.verdict.to_string()}))
                .collect();
            to_text(&json!({
                "sequence": serde_json::to_value(&seq).expect("sequence serializes"),
                "truncation": r,
                "admissibility": adm,
                "oracle": oracle,
                "lemmas": rows,
            }))
        }
    };
    Ok(Output { text, note: Some(summary), code })
}

fn dimension(source: &SeqSource, direction: usize, k_max: usize, format: Format, digits: usize) -> Res<Output> {
    let dir = Direction::from_index(direction)?;
    let seq = load_seq(source, "minimal-admissible", k_max + 3)?;
    let d = dim_bounds(&seq, dir, k_max, digits)?;
    let text = match format {
        Format::Csv => d.to_csv(),
        Format::Json => {
            let rows: Vec<Value> = d
                .rows
                .iter()
                .map(|r| {
                    let (u, ue) = r.upper.to_decimal(digits);
                    let (l, le) = r.lower.to_decimal(digits);
                    json!({
                        "k": r.k,
                        "upper": u,
                        "upper_err": ue,
                        "lower": l,
                        "lower_err": le,
                        "flagged": r.flagged,
                        "running_min": r.running_min.as_ref().map(|m| fmt_sci(&m.hi, digits, true)),
                    })
                })
                .collect();
            to_text(&json!({
                "direction": dir.label(),
                "digits": digits,
                "sequence": serde_json::to_value(&seq).expect("sequence serializes"),
                "rows": rows,
            }))
        }
    };
    Ok(Output::ok(text))
}

fn generic(source: &SeqSource, k: usize, eps: &str, format: Format) -> Res<Output> {
    let epsilon = parse_rational(eps)?;
    let seq = load_seq(source, "generic", k + 2)?;
    let r = generic_analysis(&seq, k, &epsilon)?;
    let digits = 12;
    let bound = r.complement_bound.as_ref().map(|b| fmt_sci(b, digits, true));
    let mass_lo = r.complement_mass.as_ref().map(|m| fmt_sci(&m.lo, digits, false));
    let mass_hi = r.complement_mass.as_ref().map(|m| fmt_sci(&m.hi, digits, true));
    let verdict = r.complement_verdict.map(|v| v.to_string());
    let text = match format {
        Format::Json => to_text(&json!({
            "k": r.k,
            "epsilon": fmt_rational(&r.epsilon),
            "phases": r.phases.to_string(),
            "good_phases": r.good_phases.to_string(),
            "phase_fraction": fmt_rational(&r.fraction),
            "phase_fraction_decimal": fmt_sci(&r.fraction, digits, false),
            "covering_lhs": r.covering_lhs.to_string(),
            "covering_rhs": r.covering_rhs.to_string(),
            "covering_holds": r.covering_holds,
            "complement_bound": bound,
            "complement_mass_lo": mass_lo,
            "complement_mass_hi": mass_hi,
            "complement_verdict": verdict,
        })),
        Format::Csv => {
            let opt = |o: Option<String>| o.unwrap_or_else(|| "NA".into());
            format!(
                "k,epsilon,phases,good_phases,phase_fraction,covering_holds,complement_bound,complement_mass_hi,complement_verdict\n{},{},{},{},{},{},{},{},{}\n",
                r.k,
                fmt_rational(&r.epsilon),
                r.phases,
                r.good_phases,
                fmt_sci(&r.fraction, digits, false),
                r.covering_holds,
                opt(bound),
                opt(mass_hi),
                opt(verdict),
            )
        }
    };
    Ok(Output::ok(text))
}

#[allow(clippy::too_many_arguments)]
fn recurrence(
    n1: Option<u64>,
    file: Option<&Path>,
    depth: usize,
    level: Option<usize>,
    horizon: u64,
    alpha: &str,
    samples: usize,
    seed: u64,
    format: Format,
    digits: usize,
) -> Res<Output> {
    let alpha = parse_rational(alpha)?;
    let seq = match file {
        Some(p) => read_seq(p)?,
        None => appendix_params(depth, n1.unwrap_or(DEFAULT_N1))?,
    };
    let level = match level {
        Some(l) => l,
        None => seq.depth().checked_sub(2).ok_or_else(|| usage("recurrence needs K >= 2"))?,
    };
    let budget = step_budget_from_env()?;
    let kiet = KeaneIet::with_uniform_seed(&seq)?;
    let model = MeasureModel::new(&kiet, level, default_truncation(&seq, level), budget)?;
    let mut rng = rng_from_seed(seed);
    let mut runs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sample_point(&model, Measure::Lambda2, &mut rng);
        let y = sample_point(&model, Measure::Lambda3, &mut rng);
        runs.push(recurrence_stat(&kiet, &model, x, y, horizon, &alpha, budget)?);
    }
    let truncated = runs.iter().any(|r| r.truncated);
    let text = match format {
        Format::Csv => {
            let mut out = String::from("sample,n,d_lo,d_hi,stat_lo,stat_hi,running_min_hi\n");
            for (i, run) in runs.iter().enumerate() {
                for line in run.to_csv(digits).lines().skip(1) {
                    if line.starts_with('#') {
                        let _ = writeln!(out, "{line}");
                    } else {
                        let _ = writeln!(out, "{i},{line}");
                    }
                }
            }
            out
        }
        Format::Json => {
            let rs: Vec<Value> = runs
                .iter()
                .map(|run| {
                    let last = run.rows.last();
                    json!({
                        "x": fmt_rational(&run.x.x),
                        "x_measure": run.x.measure.map(|m| m.to_string()),
                        "y": fmt_rational(&run.y.x),
                        "y_measure": run.y.measure.map(|m| m.to_string()),
                        "steps": run.rows.len(),
                        "truncated": run.truncated,
                        "running_min_hi": last.map(|r| fmt_sci(&r.running_min_hi, digits, true)),
                        "records": run.rows.iter().map(|r| json!([
                            r.n,
                            fmt_sci(&r.d.lo, digits, false),
                            fmt_sci(&r.d.hi, digits, true),
                            fmt_sci(&r.stat_lo, digits, false),
                            fmt_sci(&r.stat_hi, digits, true),
                            fmt_sci(&r.running_min_hi, digits, true),
                        ])).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_text(&json!({
                "alpha": fmt_rational(&alpha),
                "level": level,
                "seed": seed,
                "sequence": serde_json::to_value(&seq).expect("sequence serializes"),
                "record_columns": ["n", "d_lo", "d_hi", "stat_lo", "stat_hi", "running_min_hi"],
                "samples": rs,
            }))
        }
    };
    let (code, note) = if truncated {
        (EXIT_BUDGET, Some(format!("step budget {budget} reached before N = {horizon}; records are partial")))
    } else {
        (0, None)
    };
    Ok(Output { text, note, code })
}
