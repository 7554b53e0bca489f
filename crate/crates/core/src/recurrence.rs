//! Quantitative recurrence under `d = d_{λ2+λ3}` and the finite checks of
//! the two lemmas behind it.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dimension::{complement_mass, generate_rule_with, DEFAULT_DIGIT_BUDGET};
use crate::error::{KeaneError, Result};
use crate::keane::{return_times, KeaneIet, ParamSeq, RuleTag, Verdict};
use crate::measure::{Measure, MeasureModel, MeasureValue};
use crate::num::{fmt_sci, pow_enclosure, rat, uint_to_rat, Rational};

/// Bits of the fixed-point scale used for `n^α`.
const POW_BITS: u32 = 64;

/// `m_k = k^2 n_k`, `n_{k+1} = b_{k,2}^2`.
pub fn appendix_params(depth: usize, n1: u64) -> Result<ParamSeq> {
    generate_rule_with(&RuleTag::Appendix, depth, n1, DEFAULT_DIGIT_BUDGET)
}

/// A point together with the measure it was drawn for, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePoint {
    pub x: Rational,
    pub measure: Option<Measure>,
}

/// Draws a point from a uniformly chosen floor of the dominant tower of
/// `measure` (`I_2` for `λ2`, `I_3` for `λ3`) at a uniform dyadic offset.
pub fn sample_point(model: &MeasureModel, measure: Measure, rng: &mut ChaCha8Rng) -> SamplePoint {
    let tower = measure.index();
    let floors: Vec<_> = model.towers.floors.iter().filter(|f| f.tower == tower).collect();
    let floor = floors[rng.gen_range(0..floors.len())];
    let offset = Rational::new(rng.gen::<u32>().into(), (1u64 << 32).into());
    SamplePoint { x: &floor.left + &model.towers.widths[tower - 1] * offset, measure: Some(measure) }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceRow {
    pub n: u64,
    pub d: MeasureValue,
    pub stat_lo: Rational,
    pub stat_hi: Rational,
    pub running_min_hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceRun {
    pub x: SamplePoint,
    pub y: SamplePoint,
    pub alpha: Rational,
    pub level: usize,
    pub rows: Vec<RecurrenceRow>,
    /// Set when the step budget cut the run short of the horizon.
    pub truncated: bool,
}

impl RecurrenceRun {
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("n,d_lo,d_hi,stat_lo,stat_hi,running_min_hi\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.n,
                fmt_sci(&r.d.lo, digits, false),
                fmt_sci(&r.d.hi, digits, true),
                fmt_sci(&r.stat_lo, digits, false),
                fmt_sci(&r.stat_hi, digits, true),
                fmt_sci(&r.running_min_hi, digits, true),
            );
        }
        if self.truncated {
            out.push_str("# truncated: step budget reached\n");
        }
        out
    }
}

/// Records `n^α d(T^n x, y)` for `n = 1..=horizon`, with `d` enclosed by
/// the level-`model` towers.
pub fn recurrence_stat(
    kiet: &KeaneIet,
    model: &MeasureModel,
    x: SamplePoint,
    y: SamplePoint,
    horizon: u64,
    alpha: &Rational,
    budget: u64,
) -> Result<RecurrenceRun> {
    if *alpha < Rational::zero() {
        return Err(KeaneError::domain("alpha must be nonnegative"));
    }
    for p in [&x.x, &y.x] {
        if *p < Rational::zero() || *p >= Rational::one() {
            return Err(KeaneError::domain("points must lie in [0,1)"));
        }
    }
    let steps = horizon.min(budget);
    let mut rows = Vec::with_capacity(steps as usize);
    let mut z = x.x.clone();
    let mut running: Option<Rational> = None;
    for n in 1..=steps {
        z = kiet.iet.apply(&z)?;
        let (a, b) = if z <= y.x { (&z, &y.x) } else { (&y.x, &z) };
        let d = model.combined(a, b);
        let (plo, phi) = pow_enclosure(&BigUint::from(n), alpha, POW_BITS)?;
        let stat_lo = &d.lo * plo;
        let stat_hi = &d.hi * phi;
        let rm = match running {
            Some(r) if r <= stat_hi => r,
            _ => stat_hi.clone(),
        };
        running = Some(rm.clone());
        rows.push(RecurrenceRow { n, d, stat_lo, stat_hi, running_min_hi: rm });
    }
    Ok(RecurrenceRun { x, y, alpha: alpha.clone(), level: model.towers.level, rows, truncated: steps < horizon })
}

// ---------------------------------------------------------------------------
// Lemma checks

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCheck {
    pub exponent: Rational,
    pub rho_lo: Rational,
    pub rho_hi: Rational,
    /// Upper enclosure of the `λ2`-mass the neighborhood adds to `O(I_3^(k))`.
    pub extra_hi: Rational,
    /// `(b_{k-1,1} + b_{k-1,4} + b_{k-1,3}) 2ρ`, lower end.
    pub allowance_lo: Rational,
    pub margin: Rational,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlledNiceReport {
    pub k: usize,
    pub c: Rational,
    /// `λ2(O(I_3^(k)))`, common to both sides.
    pub core_mass: MeasureValue,
    /// The check at radius exponent `α`, then at `1/2` when different.
    pub checks: Vec<RadiusCheck>,
}

impl ControlledNiceReport {
    pub fn verdict(&self) -> Verdict {
        self.checks[0].verdict
    }
}

/// Compares the `λ2`-mass of the `ρ`-neighborhood of `O(I_3^(k))` in `d`
/// with `λ2(O(I_3^(k))) + (b_{k-1,1}+b_{k-1,4}+b_{k-1,3}) 2ρ`, where
/// `ρ = c floor(n_k b_{k-1,3}/(k-1)^2)^{-α}`.
///
/// Each gap between components of `O(I_3^(k))` adds at most `min(2ρ, λ2(gap))`
/// (one side only for the two end gaps), since `λ2 <= d` on intervals.
/// Nothing here bounds the neighborhood mass from below, so the verdict is
/// PASS or INCONCLUSIVE.
pub fn controlled_nice_check(model: &MeasureModel, seq: &ParamSeq, c: &Rational, alpha: &Rational) -> Result<ControlledNiceReport> {
    let k = model.towers.level;
    if k < 2 {
        return Err(KeaneError::domain("controlled-nice check needs level k >= 2"));
    }
    if *c < Rational::zero() {
        return Err(KeaneError::domain("c must be nonnegative"));
    }
    let prev = return_times(seq, k - 1)?;
    let km1 = BigUint::from(k - 1);
    let base = (seq.n(k) * prev.get(3)).div_floor(&(&km1 * &km1));
    let weight = uint_to_rat(&(prev.get(1) + prev.get(4) + prev.get(3)));

    let gaps = gap_masses(model);
    let core = tower_mass(model, 3);

    let mut exponents = vec![alpha.clone()];
    if *alpha != rat(1, 2) {
        exponents.push(rat(1, 2));
    }
    let mut checks = Vec::new();
    for e in exponents {
        let (plo, phi) = pow_enclosure(&base, &e, POW_BITS)?;
        let (rho_lo, rho_hi) = if c.is_zero() { (Rational::zero(), Rational::zero()) } else { (c / phi, c / plo) };
        let two_rho = &rho_hi * rat(2, 1);
        let extra_hi: Rational = gaps
            .iter()
            .map(|(mass, at_end)| if *at_end { mass.min(&rho_hi).clone() } else { mass.min(&two_rho).clone() })
            .sum();
        let allowance_lo = &weight * rat(2, 1) * &rho_lo;
        let verdict = if extra_hi <= allowance_lo { Verdict::Pass } else { Verdict::Inconclusive };
        let margin = &allowance_lo - &extra_hi;
        checks.push(RadiusCheck { exponent: e, rho_lo, rho_hi, extra_hi, allowance_lo, margin, verdict });
    }
    Ok(ControlledNiceReport { k, c: c.clone(), core_mass: core, checks })
}

/// Upper `λ2` enclosures of the maximal runs of floors outside tower 3,
/// flagged when the run touches 0 or 1.
fn gap_masses(model: &MeasureModel) -> Vec<(Rational, bool)> {
    let floors = &model.towers.floors;
    let den = model.towers.return_times.as_rats();
    let mut out = Vec::new();
    let mut counts = [0u64; 4];
    let mut start = 0usize;
    let mut open = false;
    let close = |counts: &[u64; 4], at_end: bool, out: &mut Vec<(Rational, bool)>| {
        let w: [Rational; 4] = std::array::from_fn(|j| Rational::from_integer(counts[j].into()));
        out.push((model.lambda2.range(&w, &den).1, at_end));
    };
    for (i, f) in floors.iter().enumerate() {
        if f.tower == 3 {
            if open {
                close(&counts, start == 0, &mut out);
                open = false;
            }
        } else {
            if !open {
                counts = [0; 4];
                start = i;
                open = true;
            }
            counts[f.tower - 1] += 1;
        }
    }
    if open {
        close(&counts, true, &mut out);
    }
    out
}

fn tower_mass(model: &MeasureModel, j: usize) -> MeasureValue {
    let b = &model.towers.return_times;
    let mut w: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    w[j - 1] = uint_to_rat(b.get(j));
    let (lo, hi) = model.lambda2.range(&w, &b.as_rats());
    MeasureValue { lo, hi, level: model.towers.level, truncation: model.lambda2.truncation }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlMostReport {
    pub k: usize,
    pub bound: Rational,
    pub mass: MeasureValue,
    pub mass_verdict: Verdict,
    /// `b_{k,i} b_{k,2} < n_{k+1}` for `i = 1, 3, 4`.
    pub small_ratios: [bool; 3],
    /// `1/k^2 + 3/b_{k,2}` and the same at `k + 1`.
    pub witness: (Rational, Rational),
    pub witness_decreases: bool,
}

impl ControlMostReport {
    pub fn verdict(&self) -> Verdict {
        let side = if self.small_ratios.iter().all(|&b| b) && self.witness_decreases { Verdict::Pass } else { Verdict::Fail };
        self.mass_verdict.max(side)
    }
}

pub fn control_most_bound(seq: &ParamSeq, k: usize) -> Result<ControlMostReport> {
    if k == 0 {
        return Err(KeaneError::domain("control-most bound needs k >= 1"));
    }
    let cm = complement_mass(seq, k)?;
    let b = return_times(seq, k)?;
    let next = return_times(seq, k + 1)?;
    let n_next = seq.n(k + 1);
    let small_ratios = [1, 3, 4].map(|i| b.get(i) * b.get(2) < *n_next);
    let w = |k: usize, b2: &BigUint| rat(1, (k * k) as i64) + rat(3, 1) / uint_to_rat(b2);
    let witness = (w(k, b.get(2)), w(k + 1, next.get(2)));
    let witness_decreases = witness.1 < witness.0;
    Ok(ControlMostReport {
        k,
        bound: cm.bound,
        mass: cm.mass,
        mass_verdict: cm.verdict,
        small_ratios,
        witness,
        witness_decreases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::default_truncation;

    #[test]
    fn appendix_examples() {
        let one = appendix_params(1, 10).unwrap();
        assert_eq!((one.m(1).to_string(), one.n(1).to_string()), ("10".into(), "10".into()));
        let two = appendix_params(2, 10).unwrap();
        assert_eq!(two.n(2), &BigUint::from(441u32));
        assert_eq!(two.m(2), &BigUint::from(1764u32));
    }

    fn model(depth: usize, k: usize) -> (ParamSeq, KeaneIet, MeasureModel) {
        let seq = appendix_params(depth, 10).unwrap();
        let kiet = KeaneIet::with_uniform_seed(&seq).unwrap();
        let m = MeasureModel::new(&kiet, k, default_truncation(&seq, k), 10_000_000).unwrap();
        (seq, kiet, m)
    }

    #[test]
    fn zero_exponent_and_running_min() {
        let (_, kiet, m) = model(3, 1);
        let x = SamplePoint { x: rat(1, 3), measure: None };
        let run = recurrence_stat(&kiet, &m, x.clone(), x, 200, &Rational::zero(), 1_000).unwrap();
        assert_eq!(run.rows.len(), 200);
        for w in run.rows.windows(2) {
            assert!(w[1].running_min_hi <= w[0].running_min_hi);
        }
        assert!(run.rows.iter().all(|r| r.stat_hi == r.d.hi));
        let short = recurrence_stat(&kiet, &m, run.x.clone(), run.y.clone(), 50, &rat(1, 2), 10).unwrap();
        assert!(short.truncated);
    }

    #[test]
    fn zero_radius_is_exact() {
        let (seq, _, m) = model(4, 2);
        let r = controlled_nice_check(&m, &seq, &Rational::zero(), &rat(1, 2)).unwrap();
        assert_eq!(r.checks[0].extra_hi, Rational::zero());
        assert_eq!(r.verdict(), Verdict::Pass);
    }

    #[test]
    fn sampling_is_seeded() {
        let (_, _, m) = model(3, 1);
        let a = sample_point(&m, Measure::Lambda2, &mut rng_from_seed(7));
        let b = sample_point(&m, Measure::Lambda2, &mut rng_from_seed(7));
        assert_eq!(a, b);
        assert_eq!(m.towers.floor_of(&a.x).unwrap().tower, 2);
    }
}
