//! One check per acceptance criterion. Every criterion runs even when an
//! earlier one fails, and each prints a single PASS or FAIL line.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use keane::certlog::Interval;
use keane::dimension::{
    alpha2_exponents, dim_bounds, floor_representatives, generate_rule, generic_analysis, phase_is_good,
    t_k_simulated, t_k_symbolic, DimBound, Direction,
};
use keane::keane::{all_return_times, check_recurrences, prod_upto, return_times, KeaneIet, ParamSeq, RuleTag, Verdict};
use keane::measure::{default_truncation, lemma_suite, level_measure, Measure, MeasureModel, TowerDecomposition};
use keane::num::{rat, Rational};
use keane::oracle::induction_oracle;
use keane::recurrence::{
    appendix_params, control_most_bound, controlled_nice_check, recurrence_stat, rng_from_seed, sample_point,
};

const BUDGET: u64 = 10_000_000;

type Outcome = Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn f(r: &Rational) -> f64 {
    keane::num::to_f64(r)
}

fn time_gate(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        return fail(format!("took {t:.1?}, limit {limit:?}"));
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let pairs = [(33, 10), (36, 11), (60, 12), (99, 20), (600, 150), (10, 3)];
    for (m, n) in pairs {
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(m, n)]).map_err(e)?;
        let b12 = return_times(&seq, 1).map_err(e)?.get(2).clone();
        if b12 > BigUint::from(1000u32) {
            return fail(format!("({m},{n}) has b_12 = {b12}"));
        }
        let r = induction_oracle(&seq, 1, BUDGET).map_err(e)?;
        if !r.matches() {
            return fail(format!("mismatch for ({m},{n}): {r:?}"));
        }
    }
    let two = [[(33, 10), (201, 66)], [(33, 10), (198, 65)]];
    for p in two {
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &p).map_err(e)?;
        let b22 = return_times(&seq, 2).map_err(e)?.get(2).clone();
        if b22 > BigUint::from(1_000_000u32) {
            return fail(format!("{p:?} has b_22 = {b22}"));
        }
        let r = induction_oracle(&seq, 2, BUDGET).map_err(e)?;
        if !r.matches() {
            return fail(format!("mismatch for {p:?}: {r:?}"));
        }
    }
    time_gate(start, Duration::from_secs(60))?;
    Ok(format!("{} one-level pairs and {} two-level sequences match exactly in {:.1?}", pairs.len(), two.len(), start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (k_max, r) = (4, 3);
    let seq = generate_rule(&RuleTag::MinimalAdmissible, k_max + r + 1).map_err(e)?;
    let suite = lemma_suite(&seq, k_max, r).map_err(e)?;
    let rows = suite.rows.len();
    let pass = suite.count(Verdict::Pass);
    let fails = suite.count(Verdict::Fail);
    let detail = format!("{rows} rows, {pass} PASS, {fails} FAIL, {:.1?}", start.elapsed());
    time_gate(start, Duration::from_secs(30))?;
    if rows != 16 * (k_max + 1) {
        return fail(format!("expected {} rows: {detail}", 16 * (k_max + 1)));
    }
    if fails > 0 || suite.pass_fraction() < rat(4, 5) {
        return fail(detail);
    }
    Ok(detail)
}

/// Random sequences with `3(n_k+1) <= m_k <= (n_{k+1}+1)/2` and `n_1 > 9`.
fn random_admissible(rng: &mut ChaCha8Rng, max_depth: usize) -> ParamSeq {
    let depth = rng.gen_range(1..=max_depth);
    let mut n = rng.gen_range(10u64..40);
    let mut pairs = Vec::with_capacity(depth);
    for _ in 0..depth {
        let m = 3 * (n + 1) + rng.gen_range(0..20);
        pairs.push((m, n));
        n = 2 * m - 1 + rng.gen_range(0..40);
    }
    ParamSeq::from_u64(RuleTag::Explicit, &pairs).expect("admissible by construction")
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 100;
    let mut levels = 0;
    for _ in 0..trials {
        let seq = random_admissible(&mut rng, 4);
        let all = all_return_times(&seq);
        for (k, b) in all.iter().enumerate().skip(1) {
            levels += 1;
            let b2 = b.get(2);
            if [1, 3, 4].iter().any(|&i| b.get(i) >= b2) {
                return fail(format!("b_{k},2 not the largest for {:?}", seq.to_json()));
            }
            if *b2 > prod_upto(&seq, k, |m, _| BigUint::from(2u32) * m) {
                return fail(format!("b_{k},2 above the product of 2m_i"));
            }
            if *b.get(3) <= prod_upto(&seq, k, |_, n| n.clone()) {
                return fail(format!("b_{k},3 not above the product of n_i"));
            }
        }
        check_recurrences(&seq).map_err(e)?;
    }
    Ok(format!("{trials} random sequences, {levels} levels"))
}

fn criterion_4() -> Outcome {
    let seq = generate_rule(&RuleTag::MinimalAdmissible, 8).map_err(e)?;
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut tower_ok = true;
    for k in 1..=5 {
        let r = default_truncation(&seq, k);
        for measure in [Measure::Lambda2, Measure::Lambda3] {
            let lm = level_measure(&seq, measure, k, r).map_err(e)?;
            checked += 1;
            tower_ok &= lm.within_tower_bounds;
            if !lm.within_stated_bounds {
                let b = return_times(&seq, k).map_err(e)?;
                let i = measure.index();
                let scaled_lo = f(&lm.value.lo) * f(&Rational::from_integer(b.get(i).clone().into()));
                violations.push(format!("{measure} at k={k}: b*enclosure starts at {scaled_lo:.3}"));
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{checked} level enclosures inside the stated bounds"))
    } else {
        fail(format!(
            "{} of {checked} outside: {}; lambda2 within [1/b, 4/b] at every level: {tower_ok}",
            violations.len(),
            violations.join("; ")
        ))
    }
}

fn lower_lo(row: &DimBound) -> Rational {
    row.lower.lo.clone()
}

fn criterion_5() -> Outcome {
    // m_k = n_k^k: the dim(λ3, d_λ2) upper sequence falls.
    let k_max = 3;
    let seq = generate_rule(&"flip(-,0)".parse().map_err(e)?, k_max + 2).map_err(e)?;
    let up = dim_bounds(&seq, Direction::Three, k_max, 30).map_err(e)?;
    let (first, last) = (&up.rows[0], up.rows.last().expect("rows"));
    if last.k < 3 || last.upper.hi >= rat(1, 2) || last.upper.hi >= first.upper.lo {
        return fail(format!("m=n^k upper: k=1 {:.4}, k={} {:.4}", f(&first.upper.lo), last.k, f(&last.upper.hi)));
    }
    let mut detail = format!("m=n^k upper k=1 {:.3} -> k={} {:.3}", f(&first.upper.lo), last.k, f(&last.upper.hi));
    // m_k = 4n_k, n_{k+1} = 4m_k: both lower sequences rise past 3/4.
    let k_max = 6;
    let seq = generate_rule(&"flip(1,1)".parse().map_err(e)?, k_max + 2).map_err(e)?;
    for dir in [Direction::Two, Direction::Three] {
        let d = dim_bounds(&seq, dir, k_max, 30).map_err(e)?;
        let (first, last) = (&d.rows[0], d.rows.last().expect("rows"));
        let ok = last.k >= 5 && lower_lo(last) > rat(3, 4) && lower_lo(last) > first.lower.hi;
        let s = format!("{} lower k=1 {:.3} -> k={} {:.3}", dir.label(), f(&first.lower.hi), last.k, f(&lower_lo(last)));
        if !ok {
            return fail(s);
        }
        detail.push_str("; ");
        detail.push_str(&s);
    }
    Ok(detail)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let seq = generate_rule(&RuleTag::Alpha2(rat(1, 2)), 6).map_err(e)?;
    let digits = (1..=seq.depth()).map(|i| seq.m(i).to_string().len().max(seq.n(i).to_string().len())).max().unwrap_or(0);
    if digits > 100_000 {
        return fail(format!("parameters need {digits} digits"));
    }
    let s = alpha2_exponents(&seq, 4, 30).map_err(e)?;
    let half = Interval::point(rat(1, 2));
    let dist: Vec<Interval> = s
        .iter()
        .map(|x| {
            let d = x.sub(&half);
            if d.lo >= Rational::zero() { d } else if d.hi <= Rational::zero() { d.neg() } else { Interval { lo: Rational::zero(), hi: d.hi.max(-d.lo) } }
        })
        .collect();
    time_gate(start, Duration::from_secs(60))?;
    let listing = s.iter().map(|x| format!("{:.4}", f(&x.lo))).collect::<Vec<_>>().join(", ");
    let decreasing = dist.windows(2).all(|w| w[1].hi < w[0].lo);
    if decreasing {
        Ok(format!("s_1..s_4 = {listing}"))
    } else {
        fail(format!("|s_k - 1/2| does not decrease; s_1..s_4 = {listing}"))
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 100;
    for _ in 0..trials {
        let seq = random_admissible(&mut rng, 4);
        let k = rng.gen_range(1..=seq.depth());
        let base = all_return_times(&seq);
        let bump = |dm: u32, dn: u32| {
            let pairs = (1..=seq.depth())
                .map(|i| if i == k { (seq.m(i) + dm, seq.n(i) + dn) } else { (seq.m(i).clone(), seq.n(i).clone()) })
                .collect();
            ParamSeq::new(RuleTag::Explicit, pairs).map(|s| all_return_times(&s))
        };
        let nb = bump(0, 1).map_err(e)?;
        let mb = bump(1, 0).map_err(e)?;
        for i in 0..k {
            if nb[i].get(2) != base[i].get(2) || nb[i].get(3) != base[i].get(3) {
                return fail(format!("n_{k} changed b_{i}"));
            }
            if mb[i].get(2) != base[i].get(2) {
                return fail(format!("m_{k} changed b_{i},2"));
            }
        }
        for i in 0..=k {
            if mb[i].get(3) != base[i].get(3) {
                return fail(format!("m_{k} changed b_{i},3"));
            }
        }
    }
    Ok(format!("{trials} randomized perturbations"))
}

fn criterion_8() -> Outcome {
    let seq = generate_rule(&RuleTag::Generic, 4).map_err(e)?;
    let eps = rat(1, 10);
    let mut covering = Vec::new();
    for k in [2, 3] {
        let r = generic_analysis(&seq, k, &eps).map_err(e)?;
        covering.push((k, r.covering_holds));
    }
    // Phase check at k = 1 against the orbit.
    let shallow = seq.truncated(2).map_err(e)?;
    let kiet = KeaneIet::with_uniform_seed(&shallow).map_err(e)?;
    let towers = TowerDecomposition::build(&kiet, 1, BUDGET).map_err(e)?;
    let reps = floor_representatives(&kiet, 1, 12).map_err(e)?;
    let b1 = return_times(&shallow, 1).map_err(e)?.get(1).clone();
    let mut agree = 0;
    for rep in &reps {
        let sim = t_k_simulated(&kiet, &towers, &rep.x, BUDGET).map_err(e)?;
        let sym = t_k_symbolic(&towers, &rep.x, BUDGET).map_err(e)?;
        if sim == sym && sim == rep.predicted && phase_is_good(&b1, sym, &eps) == phase_is_good(&b1, sim, &eps) {
            agree += 1;
        }
    }
    let cov = covering.iter().map(|(k, h)| format!("k={k} {h}")).collect::<Vec<_>>().join(", ");
    let detail = format!("covering {cov}; t_1 agrees on {agree}/{} representatives", reps.len());
    if reps.len() >= 10 && agree == reps.len() && covering.iter().all(|(_, h)| *h) {
        Ok(detail)
    } else {
        fail(detail)
    }
}

fn criterion_9() -> Outcome {
    let seq4 = appendix_params(4, 10).map_err(e)?;
    let kiet = KeaneIet::with_uniform_seed(&seq4).map_err(e)?;
    let model = MeasureModel::new(&kiet, 2, 2, BUDGET).map_err(e)?;
    let nice = controlled_nice_check(&model, &seq4, &Rational::one(), &rat(1, 2)).map_err(e)?;
    if nice.verdict() != Verdict::Pass {
        return fail(format!("controlled_nice_check {}", nice.verdict()));
    }
    let seq5 = appendix_params(5, 10).map_err(e)?;
    let most = control_most_bound(&seq5, 2).map_err(e)?;
    if most.verdict() != Verdict::Pass {
        return fail(format!("control_most_bound {}", most.verdict()));
    }
    let start = Instant::now();
    let seq3 = appendix_params(3, 10).map_err(e)?;
    let kiet = KeaneIet::with_uniform_seed(&seq3).map_err(e)?;
    let model = MeasureModel::new(&kiet, 1, default_truncation(&seq3, 1), BUDGET).map_err(e)?;
    let mut rng = rng_from_seed(9);
    let x = sample_point(&model, Measure::Lambda2, &mut rng);
    let y = sample_point(&model, Measure::Lambda3, &mut rng);
    let horizon = 10_000;
    let run = recurrence_stat(&kiet, &model, x, y, horizon, &rat(1, 2), BUDGET).map_err(e)?;
    if run.truncated || run.rows.len() as u64 != horizon {
        return fail(format!("recurrence run stopped after {} steps", run.rows.len()));
    }
    let monotone = run.rows.windows(2).all(|w| w[1].running_min_hi <= w[0].running_min_hi);
    let certified = run.rows.iter().all(|r| {
        Rational::zero() <= r.d.lo && r.d.lo <= r.d.hi && r.d.hi <= rat(2, 1) && r.stat_lo <= r.stat_hi && r.running_min_hi <= r.stat_hi
    });
    if !monotone || !certified {
        return fail(format!("running minima monotone {monotone}, enclosures ordered {certified}"));
    }
    let last = run.rows.last().expect("rows");
    Ok(format!(
        "controlled_nice PASS, control_most PASS, {horizon} steps in {:.1?} ending at running min {:.4}",
        start.elapsed(),
        f(&last.running_min_hi)
    ))
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, Option<i32>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_keane")).args(args).output().map_err(e)?;
    Ok((out.stdout, out.status.code()))
}

fn criterion_10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("keane-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(e)?;
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"command":"recurrence","K":3,"N":500,"alpha":"1/2","seed":11,"samples":2}"#).map_err(e)?;
    let config = config.to_string_lossy().into_owned();
    let runs: Vec<Vec<&str>> = vec![
        vec!["params", "--rule", "generic", "--K", "3"],
        vec!["verify", "--K-max", "2", "--r", "2", "--format", "json"],
        vec!["dimension", "--rule", "flip11", "--direction", "2", "--K", "3"],
        vec!["generic", "--k", "1", "--eps", "1/10"],
        vec!["recurrence", "--K", "3", "--N", "500", "--alpha", "1/2", "--seed", "5", "--format", "json"],
        vec!["--config", &config],
    ];
    let mut diffs = Vec::new();
    for args in &runs {
        let a = run_cli(args)?;
        let b = run_cli(args)?;
        if a != b || a.0.is_empty() || a.1 != Some(0) {
            diffs.push(args.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    if diffs.is_empty() {
        Ok(format!("{} commands byte-identical across reruns", runs.len()))
    } else {
        fail(format!("differing or failing: {}", diffs.join("; ")))
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 induction oracle", criterion_1),
        ("2 lemma suite", criterion_2),
        ("3 return-time laws", criterion_3),
        ("4 level-measure sandwich", criterion_4),
        ("5 flip-rule trends", criterion_5),
        ("6 alpha2(1/2) convergence", criterion_6),
        ("7 independence facts", criterion_7),
        ("8 generic points", criterion_8),
        ("9 appendix lemmas", criterion_9),
        ("10 determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                println!("criterion {name}: FAIL ({detail})");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}

