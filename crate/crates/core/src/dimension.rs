//! Dimension-bound sequences, parameter rules, and the finite-depth
//! generic-point analysis.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::certlog::{bits_for_digits, ln, ln_interval, ln_uint, Interval};
use crate::error::{KeaneError, Result};
use crate::keane::{all_return_times, return_times, FlipChoice, KeaneIet, ParamSeq, RuleTag, Verdict};
use crate::measure::{default_truncation, orbit_measure, piece_measure, ratio_enclosure, Measure, MeasureValue, TowerDecomposition};
use crate::num::{floor_pow_recip, fmt_sci, to_f64, uint_to_rat, Rational};

/// Default cap on decimal digits of any generated parameter.
pub const DEFAULT_DIGIT_BUDGET: usize = 100_000;

/// Starting value `n_1` of every generated rule.
pub const DEFAULT_N1: u64 = 10;

// ---------------------------------------------------------------------------
// Rule generation

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn check_digits(x: &BigUint, budget: usize) -> Result<()> {
    // bits * log10(2) bounds the decimal length from below within one digit.
    let digits = (x.bits() as f64 * std::f64::consts::LOG10_2).floor() as usize + 1;
    if digits > budget {
        return Err(KeaneError::Budget { what: "parameter digits".into(), limit: budget as u64 });
    }
    Ok(())
}

fn pow_k(x: &BigUint, k: usize, budget: usize) -> Result<BigUint> {
    let est = (x.bits() as f64 * std::f64::consts::LOG10_2) * k as f64;
    if est > budget as f64 + 1.0 {
        return Err(KeaneError::Budget { what: "parameter digits".into(), limit: budget as u64 });
    }
    Ok(Pow::pow(x, k as u32))
}

/// Generates `K` pairs of the sequence named by `rule`.
///
/// Every strict inequality of a rule is met by the smallest integer that
/// satisfies it. `flip` coordinates combine the steering choice with the
/// admissibility lower bound by taking the larger of the two.
pub fn generate_rule(rule: &RuleTag, depth: usize) -> Result<ParamSeq> {
    generate_rule_with(rule, depth, DEFAULT_N1, DEFAULT_DIGIT_BUDGET)
}

pub fn generate_rule_with(rule: &RuleTag, depth: usize, n1: u64, digit_budget: usize) -> Result<ParamSeq> {
    if depth == 0 {
        return Err(KeaneError::domain("depth must be at least 1"));
    }
    let pairs = match rule {
        RuleTag::Explicit => return Err(KeaneError::domain("explicit sequences are read, not generated")),
        RuleTag::MinimalAdmissible => iterate(depth, n1, digit_budget, |_, n, _| Ok(big(3) * (n + 1u32)), |_, m, _| {
            Ok(big(2) * m - 1u32)
        })?,
        RuleTag::Flip { lambda2, lambda3 } => {
            let (l2, l3) = (*lambda2, *lambda3);
            iterate(
                depth,
                n1,
                digit_budget,
                move |k, n, b| {
                    let floor = big(3) * (n + 1u32);
                    Ok(match l3 {
                        FlipChoice::Zero => pow_k(n, k, b)?.max(floor),
                        FlipChoice::One => (big(4) * n).max(floor),
                        FlipChoice::Free => floor,
                    })
                },
                move |k, m, b| {
                    let floor = big(2) * m - 1u32;
                    Ok(match l2 {
                        FlipChoice::Zero => pow_k(m, k, b)?.max(floor),
                        FlipChoice::One => (big(4) * m).max(floor),
                        FlipChoice::Free => floor,
                    })
                },
            )?
        }
        RuleTag::Generic => iterate_with_b(depth, n1, digit_budget, |_, n, _, _| Ok(big(3) * n), |k, _, b2, budget| {
            pow_k(b2, k, budget)
        })?,
        RuleTag::Appendix => {
            iterate_with_b(depth, n1, digit_budget, |k, n, _, _| Ok(big((k * k) as u64) * n), |_, _, b2, budget| {
                pow_k(b2, 2, budget)
            })?
        }
        RuleTag::Alpha2(alpha) => alpha2_pairs(alpha, depth, n1, digit_budget)?,
        RuleTag::Alpha3(alpha) => alpha3_pairs(alpha, depth, n1, digit_budget)?,
    };
    ParamSeq::new(rule.clone(), pairs)
}

/// `m_k = f(k, n_k)`, `n_{k+1} = g(k, m_k)`.
fn iterate(
    depth: usize,
    n1: u64,
    budget: usize,
    f: impl Fn(usize, &BigUint, usize) -> Result<BigUint>,
    g: impl Fn(usize, &BigUint, usize) -> Result<BigUint>,
) -> Result<Vec<(BigUint, BigUint)>> {
    let mut pairs = Vec::with_capacity(depth);
    let mut n = big(n1);
    for k in 1..=depth {
        let m = f(k, &n, budget)?;
        check_digits(&m, budget)?;
        pairs.push((m.clone(), n));
        if k < depth {
            n = g(k, &m, budget)?;
            check_digits(&n, budget)?;
        } else {
            n = BigUint::zero();
        }
    }
    Ok(pairs)
}

/// `m_k = f(k, n_k)`, `n_{k+1} = g(k, m_k, b_{k,2})`.
fn iterate_with_b(
    depth: usize,
    n1: u64,
    budget: usize,
    f: impl Fn(usize, &BigUint, &BigUint, usize) -> Result<BigUint>,
    g: impl Fn(usize, &BigUint, &BigUint, usize) -> Result<BigUint>,
) -> Result<Vec<(BigUint, BigUint)>> {
    let mut pairs: Vec<(BigUint, BigUint)> = Vec::with_capacity(depth);
    let mut b: [BigUint; 4] = std::array::from_fn(|_| BigUint::one());
    let mut n = big(n1);
    for k in 1..=depth {
        let m = f(k, &n, &b[1], budget)?;
        check_digits(&m, budget)?;
        let seq = ParamSeq::new(RuleTag::Explicit, vec![(m.clone(), n.clone())])?;
        b = seq.matrix(1).left_apply_int(&b);
        pairs.push((m.clone(), n));
        n = BigUint::zero();
        if k < depth {
            n = g(k, &m, &b[1], budget)?;
            check_digits(&n, budget)?;
        }
    }
    Ok(pairs)
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if *alpha <= Rational::zero() || *alpha > Rational::one() {
        return Err(KeaneError::domain(format!("alpha must lie in (0,1], got {alpha}")));
    }
    Ok(())
}

/// `(m_1, n_1)` minimal, `n_2 = 2m_1 - 1`, then `m_{k+1} = (n_{k+1} b_{k,3})^k + 1`
/// and `n_{k+2} = floor(m_{k+1}^{1/α})`.
fn alpha2_pairs(alpha: &Rational, depth: usize, n1: u64, budget: usize) -> Result<Vec<(BigUint, BigUint)>> {
    check_alpha(alpha)?;
    let n1 = big(n1);
    let m1 = big(3) * (&n1 + 1u32);
    let mut pairs = vec![(m1.clone(), n1)];
    let mut n_next = big(2) * &m1 - 1u32;
    for k in 1..depth {
        let seq = ParamSeq::new(RuleTag::Explicit, pairs.clone())?;
        let b3 = return_times(&seq, k)?.get(3).clone();
        let m = pow_k(&(&n_next * b3), k, budget)? + 1u32;
        check_digits(&m, budget)?;
        pairs.push((m.clone(), n_next));
        n_next = floor_pow_recip_checked(&m, alpha, budget)?;
    }
    Ok(pairs)
}

/// `floor(m^{1/α})` after a size estimate against the digit budget.
fn floor_pow_recip_checked(m: &BigUint, alpha: &Rational, budget: usize) -> Result<BigUint> {
    let est = m.bits() as f64 * std::f64::consts::LOG10_2 / to_f64(alpha);
    if est > budget as f64 + 1.0 {
        return Err(KeaneError::Budget { what: "parameter digits".into(), limit: budget as u64 });
    }
    floor_pow_recip(m, alpha)
}

/// On even indices `n_k = b_{k-1,2}^k + 1` and `m_k = floor(n_k^{1/α})`;
/// elsewhere `n_{k+1} = 2m_k` and then `m_{k+1} = 3n_{k+1}`. `m_1 = 3n_1`.
fn alpha3_pairs(alpha: &Rational, depth: usize, n1: u64, budget: usize) -> Result<Vec<(BigUint, BigUint)>> {
    check_alpha(alpha)?;
    let n1 = big(n1);
    let mut pairs = vec![(big(3) * &n1, n1)];
    for k in 2..=depth {
        let (n, m) = if k % 2 == 0 {
            let seq = ParamSeq::new(RuleTag::Explicit, pairs.clone())?;
            let b2 = return_times(&seq, k - 1)?.get(2).clone();
            let n = pow_k(&b2, k, budget)? + 1u32;
            check_digits(&n, budget)?;
            let m = floor_pow_recip_checked(&n, alpha, budget)?;
            (n, m)
        } else {
            let n = big(2) * &pairs[k - 2].0;
            let m = big(3) * &n;
            (n, m)
        };
        check_digits(&m, budget)?;
        pairs.push((m, n));
    }
    Ok(pairs)
}

// ---------------------------------------------------------------------------
// Dimension bounds

/// Which dimension a bound sequence estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `dim(λ2, d_λ3)`.
    Two,
    /// `dim(λ3, d_λ2)`.
    Three,
}

impl Direction {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            2 => Ok(Direction::Two),
            3 => Ok(Direction::Three),
            _ => Err(KeaneError::domain(format!("direction must be 2 or 3, got {i}"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Two => "dim(lambda2,d_lambda3)",
            Direction::Three => "dim(lambda3,d_lambda2)",
        }
    }

    fn measured(self) -> (Measure, Measure, usize) {
        match self {
            Direction::Two => (Measure::Lambda2, Measure::Lambda3, 2),
            Direction::Three => (Measure::Lambda3, Measure::Lambda2, 3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimBound {
    pub k: usize,
    pub upper: Interval,
    pub lower: Interval,
    /// The log base touches 1, so the quotients are unbounded.
    pub flagged: bool,
    /// Running minimum of the upper sequence over unflagged levels.
    pub running_min: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimBoundSeq {
    pub direction: Direction,
    pub digits: usize,
    pub rows: Vec<DimBound>,
}

impl DimBoundSeq {
    pub fn last(&self) -> Option<&DimBound> {
        self.rows.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,direction,upper,upper_err,lower,lower_err,running_min\n");
        for r in &self.rows {
            let (u, ue) = r.upper.to_decimal(self.digits);
            let (l, le) = r.lower.to_decimal(self.digits);
            let rm = match &r.running_min {
                Some(iv) => fmt_sci(&iv.hi, self.digits, true),
                None => "NA".into(),
            };
            let _ = writeln!(out, "{},{},{},{},{},{},{}", r.k, self.direction.label(), u, ue, l, le, rm);
        }
        out
    }
}

fn value_interval(v: &MeasureValue) -> Interval {
    Interval { lo: v.lo.clone(), hi: v.hi.clone() }
}

/// Upper and lower dimension-bound quotients at levels `1..=k_max`.
pub fn dim_bounds(seq: &ParamSeq, direction: Direction, k_max: usize, digits: usize) -> Result<DimBoundSeq> {
    if k_max == 0 || k_max + 2 > seq.depth() {
        return Err(KeaneError::domain(format!(
            "dimension bounds up to level {k_max} need {} pairs, sequence has {}",
            k_max + 2,
            seq.depth()
        )));
    }
    let bits = bits_for_digits(digits);
    let (own, other, j) = direction.measured();
    let mut rows = Vec::with_capacity(k_max);
    let mut running: Option<Interval> = None;
    for k in 1..=k_max {
        let r = default_truncation(seq, k);
        let b = return_times(seq, k)?;
        let base = piece_measure(&ratio_enclosure(seq, other, k, r)?, &b, j);
        let own_mass = piece_measure(&ratio_enclosure(seq, own, k, r)?, &b, j);
        let flagged = base.hi >= Rational::one() || base.lo <= Rational::zero();
        let (upper, lower) = if flagged {
            let zero = Interval::point(Rational::zero());
            (zero.clone(), zero)
        } else {
            let ln_base = ln_interval(&value_interval(&base), bits)?;
            let upper = ln_uint(b.get(j), bits)?.div(&ln_base.neg())?;
            let lower = ln_interval(&value_interval(&own_mass), bits)?.div(&ln_base)?;
            (upper, lower)
        };
        if !flagged {
            running = Some(match running {
                Some(prev) => prev.min(&upper),
                None => upper.clone(),
            });
        }
        rows.push(DimBound { k, upper, lower, flagged, running_min: running.clone() });
    }
    Ok(DimBoundSeq { direction, digits, rows })
}

/// `s_k = -ln b_{k,2} / ln(m_{k+1} / (n_{k+1} n_{k+2} b_{k,3}))` for
/// `k = 1..=k_max`; needs `k_max + 2` pairs.
pub fn alpha2_exponents(seq: &ParamSeq, k_max: usize, digits: usize) -> Result<Vec<Interval>> {
    if k_max + 2 > seq.depth() {
        return Err(KeaneError::domain(format!("need {} pairs for k up to {k_max}", k_max + 2)));
    }
    let bits = bits_for_digits(digits);
    let all = all_return_times(seq);
    (1..=k_max)
        .map(|k| {
            let b = &all[k];
            let num = ln_uint(b.get(2), bits)?.neg();
            let arg = uint_to_rat(seq.m(k + 1)) / uint_to_rat(&(seq.n(k + 1) * seq.n(k + 2) * b.get(3)));
            num.div(&ln(&arg, bits)?)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Entry times into the I_1 tower

/// `t_k(x)` by stepping the exchange one point at a time.
pub fn t_k_simulated(kiet: &KeaneIet, towers: &TowerDecomposition, x: &Rational, budget: u64) -> Result<u64> {
    let mut y = x.clone();
    for steps in 0..=budget {
        let floor = towers.floor_of(&y).ok_or_else(|| KeaneError::domain("point outside [0,1)"))?;
        if floor.tower == 1 {
            return Ok(steps);
        }
        y = kiet.iet.apply(&y)?;
    }
    Err(KeaneError::Budget { what: "entry-time simulation".into(), limit: budget })
}

/// `t_k(x)` by jumping along towers with the first-return map on `I^(k)`.
pub fn t_k_symbolic(towers: &TowerDecomposition, x: &Rational, budget: u64) -> Result<u64> {
    let floor = towers.floor_of(x).ok_or_else(|| KeaneError::domain("point outside [0,1)"))?;
    if floor.tower == 1 {
        return Ok(0);
    }
    let b = |j: usize| towers.return_times.get(j).to_u64().expect("tower heights fit the budget");
    let mut j = floor.tower;
    let mut steps = b(j) - floor.height;
    let mut y = &towers.bases[j - 1] + (x - &floor.left) + &towers.return_shift[j - 1];
    for _ in 0..budget {
        j = (1..=4)
            .find(|&i| towers.bases[i - 1] <= y && y < &towers.bases[i - 1] + &towers.widths[i - 1])
            .ok_or_else(|| KeaneError::domain("return map left the base interval"))?;
        if j == 1 {
            return Ok(steps);
        }
        steps += b(j);
        y += &towers.return_shift[j - 1];
    }
    Err(KeaneError::Budget { what: "entry-time tower jumps".into(), limit: budget })
}

/// A point on the `I_3^(k+1)` tower, in pass `q` through `O(I_3^(k))` at
/// height `t`, with the entry time predicted by the travel pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloorRepresentative {
    pub x: Rational,
    pub pass: u64,
    pub height: u64,
    pub predicted: u64,
}

/// Representatives of `count` phases spread over the `n_{k+1} - 1` passes of
/// the `I_3^(k+1)` tower through `O(I_3^(k))`.
pub fn floor_representatives(kiet: &KeaneIet, k: usize, count: usize) -> Result<Vec<FloorRepresentative>> {
    let upper = kiet.level(k + 1)?;
    let b = return_times(&kiet.seq, k)?;
    let get = |j: usize| b.get(j).to_u64().ok_or_else(|| KeaneError::domain("return time too large"));
    let (b1, b3, b4) = (get(1)?, get(3)?, get(4)?);
    let passes = kiet
        .seq
        .n(k + 1)
        .to_u64()
        .ok_or_else(|| KeaneError::domain("n too large"))?
        .saturating_sub(1);
    if passes == 0 || count == 0 {
        return Ok(Vec::new());
    }
    let mut reps = Vec::with_capacity(count);
    let mut x = upper.piece_left[2].clone();
    let mut at = 0u64;
    for i in 0..count as u64 {
        let q = i * passes / count as u64;
        let t = (i * 7919) % b3;
        let target = b4 + b1 + q * b3 + t;
        while at < target {
            x = kiet.iet.apply(&x)?;
            at += 1;
        }
        let p = passes - q;
        let predicted = (b3 - t) + (p - 1) * b3 + b4;
        reps.push(FloorRepresentative { x: x.clone(), pass: q, height: t, predicted });
    }
    Ok(reps)
}

// ---------------------------------------------------------------------------
// Generic-point analysis

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericReport {
    pub k: usize,
    pub epsilon: Rational,
    /// `n_{k+1} b_{k,3}` phases of the travel pattern.
    pub phases: BigUint,
    /// Phases with `b_{k,1}/t_k < ε`.
    pub good_phases: BigUint,
    pub fraction: Rational,
    /// `b_{k,1} (k b_{k,3})^k` against `n_{k+1}`: the covering condition
    /// `(b_{k,1}/n_{k+1})^{1/k} b_{k,3} < 1/k` in integer form.
    pub covering_lhs: BigUint,
    pub covering_rhs: BigUint,
    pub covering_holds: bool,
    /// `b_{k,1}/n_{k+1} + 2 b_{k,2} m_{k+1}/(n_{k+1} n_{k+2}) + b_{k,4}/n_{k+1}`.
    pub complement_bound: Option<Rational>,
    /// `λ3` of the towers other than `O(I_3^(k))`.
    pub complement_mass: Option<MeasureValue>,
    pub complement_verdict: Option<Verdict>,
}

/// Phase counting, covering condition and complement mass at level `k`.
pub fn generic_analysis(seq: &ParamSeq, k: usize, epsilon: &Rational) -> Result<GenericReport> {
    if k == 0 || k + 1 > seq.depth() {
        return Err(KeaneError::domain(format!("generic analysis at level {k} needs {} pairs", k + 1)));
    }
    if *epsilon <= Rational::zero() {
        return Err(KeaneError::domain("epsilon must be positive"));
    }
    let b = return_times(seq, k)?;
    let (b1, b3, b4) = (b.get(1), b.get(3), b.get(4));
    let n_next = seq.n(k + 1);
    let phases = n_next * b3;
    // Phase s (steps left in the O(I_3) passes) has t_k = s + b_{k,4}.
    let cut = (uint_to_rat(b1) / epsilon - uint_to_rat(b4)).floor();
    let cut = if cut <= Rational::zero() {
        BigUint::zero()
    } else {
        cut.to_integer().to_biguint().expect("positive").min(phases.clone())
    };
    let good = &phases - &cut;
    let fraction = uint_to_rat(&good) / uint_to_rat(&phases);
    let lhs = b1 * Pow::pow(&(BigUint::from(k) * b3), k as u32);
    let covering_holds = lhs < *n_next;

    let (mut bound, mut mass, mut verdict) = (None, None, None);
    if k + 2 <= seq.depth() {
        let c = complement_mass(seq, k)?;
        bound = Some(c.bound);
        mass = Some(c.mass);
        verdict = Some(c.verdict);
    }
    Ok(GenericReport {
        k,
        epsilon: epsilon.clone(),
        phases,
        good_phases: good,
        fraction,
        covering_lhs: lhs,
        covering_rhs: n_next.clone(),
        covering_holds,
        complement_bound: bound,
        complement_mass: mass,
        complement_verdict: verdict,
    })
}

/// `λ3(O(I_1^(k)) ∪ O(I_2^(k)) ∪ O(I_4^(k)))` against the three-term bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementMass {
    pub bound: Rational,
    pub mass: MeasureValue,
    pub verdict: Verdict,
}

/// Needs `n_{k+2}`, so `k + 2` pairs.
pub fn complement_mass(seq: &ParamSeq, k: usize) -> Result<ComplementMass> {
    if k + 2 > seq.depth() {
        return Err(KeaneError::domain(format!("complement bound at level {k} needs {} pairs", k + 2)));
    }
    let b = return_times(seq, k)?;
    let n1 = uint_to_rat(seq.n(k + 1));
    let bound = uint_to_rat(b.get(1)) / &n1
        + Rational::from_integer(2.into()) * uint_to_rat(b.get(2)) * uint_to_rat(seq.m(k + 1))
            / (&n1 * uint_to_rat(seq.n(k + 2)))
        + uint_to_rat(b.get(4)) / &n1;
    let enc = ratio_enclosure(seq, Measure::Lambda3, k, default_truncation(seq, k))?;
    let mass = [1, 2, 4].iter().map(|&j| orbit_measure(&enc, &b, j)).reduce(|a, c| a.add(&c)).expect("three towers");
    let verdict = if mass.hi <= bound {
        Verdict::Pass
    } else if mass.lo > bound {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(ComplementMass { bound, mass, verdict })
}

/// Whether a phase with entry time `t` satisfies `b_{k,1}/t < ε`.
pub fn phase_is_good(b1: &BigUint, t: u64, epsilon: &Rational) -> bool {
    t > 0 && uint_to_rat(b1) / Rational::from_integer(t.into()) < *epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn pairs(seq: &ParamSeq) -> Vec<(String, String)> {
        (1..=seq.depth()).map(|k| (seq.m(k).to_string(), seq.n(k).to_string())).collect()
    }

    #[test]
    fn flip11_and_minimal() {
        let f = generate_rule(&"flip(1,1)".parse().unwrap(), 2).unwrap();
        assert_eq!(pairs(&f), vec![("40".into(), "10".into()), ("640".into(), "160".into())]);
        let m = generate_rule(&RuleTag::MinimalAdmissible, 3).unwrap();
        assert_eq!(pairs(&m)[1], ("198".into(), "65".into()));
    }

    #[test]
    fn appendix_and_generic() {
        let a = generate_rule(&RuleTag::Appendix, 2).unwrap();
        assert_eq!(pairs(&a), vec![("10".into(), "10".into()), ("1764".into(), "441".into())]);
        let g = generate_rule(&RuleTag::Generic, 3).unwrap();
        assert_eq!(pairs(&g)[1], ("123".into(), "41".into()));
        assert_eq!(g.n(3).to_string(), "30316036");
    }

    #[test]
    fn alpha2_rule_arithmetic() {
        let s = generate_rule(&RuleTag::Alpha2(rat(1, 2)), 3).unwrap();
        assert_eq!(s.m(2), &BigUint::from(65u32 * 11 + 1));
        assert_eq!(s.n(3), &(s.m(2) * s.m(2)));
        let one = generate_rule(&RuleTag::Alpha2(rat(1, 1)), 3).unwrap();
        assert_eq!(one.n(3), one.m(2));
        assert!(generate_rule(&RuleTag::Alpha2(rat(3, 2)), 3).is_err());
        assert!(generate_rule(&RuleTag::Alpha3(rat(0, 1)), 3).is_err());
    }

    #[test]
    fn alpha3_subsequence() {
        let s = generate_rule(&RuleTag::Alpha3(rat(1, 2)), 3).unwrap();
        // b_{1,2} = 30 + 10 + 1 = 41.
        assert_eq!(s.n(2), &BigUint::from(41u32 * 41 + 1));
        assert_eq!(s.m(2), &(s.n(2) * s.n(2)));
        assert_eq!(s.n(3), &(BigUint::from(2u32) * s.m(2)));
        assert_eq!(s.m(3), &(BigUint::from(3u32) * s.n(3)));
    }

    #[test]
    fn digit_budget() {
        assert!(matches!(
            generate_rule_with(&RuleTag::Generic, 6, 10, 50),
            Err(KeaneError::Budget { .. })
        ));
    }

    #[test]
    fn running_min_is_nonincreasing() {
        let seq = generate_rule(&RuleTag::MinimalAdmissible, 6).unwrap();
        let d = dim_bounds(&seq, Direction::Three, 4, 20).unwrap();
        let mins: Vec<_> = d.rows.iter().filter_map(|r| r.running_min.clone()).collect();
        assert!(mins.windows(2).all(|w| w[1].hi <= w[0].hi && w[1].lo <= w[0].lo));
        assert_eq!(d.to_csv().lines().count(), 5);
    }

    #[test]
    fn phase_fraction_counts() {
        let seq = generate_rule(&RuleTag::Generic, 2).unwrap();
        let r = generic_analysis(&seq, 1, &rat(1, 1)).unwrap();
        // b_1 = (40, 41, 11, 12): phases s with s + 12 > 40.
        assert_eq!(r.phases, BigUint::from(41u32 * 11));
        assert_eq!(r.good_phases, BigUint::from(41u32 * 11 - 28));
    }
}
