//! Certified checks of the inequalities satisfied by the ratio vectors of
//! both measures at each level.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use super::{ratio_enclosure, Measure, RatioEnclosure};
use crate::error::{KeaneError, Result};
use crate::keane::{return_times, ParamSeq, Verdict};
use crate::num::{fmt_rational, fmt_sci, rat, uint_to_rat, Rational};

/// Comparison claimed between a quantity and its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
}

impl Relation {
    fn holds(self, x: &Rational, bound: &Rational) -> bool {
        match self {
            Relation::Ge => x >= bound,
            Relation::Gt => x > bound,
            Relation::Le => x <= bound,
            Relation::Lt => x < bound,
        }
    }

    fn is_lower(self) -> bool {
        matches!(self, Relation::Ge | Relation::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }
}

pub const LEMMA_IDS: [&str; 16] = [
    "L3I2big",
    "L3I2small",
    "L3I3big",
    "L3I4small",
    "L3I4big",
    "L3I1small",
    "L3I1big",
    "L2I2big",
    "L2I3small",
    "L2I3big",
    "L2I4big",
    "L2I4small",
    "L2I1small",
    "L2I1big",
    "L3bigorbit",
    "L2bigorbit",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRow {
    pub lemma_id: &'static str,
    pub k: usize,
    pub relation: Relation,
    pub verdict: Verdict,
    pub bound: Rational,
    pub lo: Rational,
    pub hi: Rational,
    /// Signed distance from the certified edge of the enclosure to the
    /// bound, positive when the claim is certified.
    pub margin: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaSuite {
    pub truncation: usize,
    pub rows: Vec<LemmaRow>,
}

impl LemmaSuite {
    pub fn count(&self, v: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == v).count()
    }

    pub fn pass_fraction(&self) -> Rational {
        if self.rows.is_empty() {
            return Rational::zero();
        }
        rat(self.count(Verdict::Pass) as i64, self.rows.len() as i64)
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("lemma_id,k,verdict,bound,enclosure_lo,enclosure_hi,margin\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.lemma_id,
                r.k,
                r.verdict,
                fmt_rational(&r.bound),
                fmt_sci(&r.lo, digits, false),
                fmt_sci(&r.hi, digits, true),
                fmt_sci(&r.margin, digits, false),
            );
        }
        out
    }
}

fn judge(id: &'static str, k: usize, relation: Relation, bound: Rational, lo: Rational, hi: Rational) -> LemmaRow {
    let (edge, far) = if relation.is_lower() { (&lo, &hi) } else { (&hi, &lo) };
    let verdict = if relation.holds(edge, &bound) {
        Verdict::Pass
    } else if !relation.holds(far, &bound) {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let margin = if relation.is_lower() { &lo - &bound } else { &bound - &hi };
    LemmaRow { lemma_id: id, k, relation, verdict, bound, lo, hi, margin }
}

fn component(enc: &RatioEnclosure, j: usize) -> (Rational, Rational) {
    (enc.lo[j - 1].clone(), enc.hi[j - 1].clone())
}

/// Runs every lemma at levels `0..=k_max` with truncation `r`.
pub fn lemma_suite(seq: &ParamSeq, k_max: usize, r: usize) -> Result<LemmaSuite> {
    if k_max + r > seq.depth() || r < 2 {
        return Err(KeaneError::domain(format!(
            "lemma suite up to level {k_max} with truncation {r} needs r >= 2 and {} pairs, sequence has {}",
            k_max + r,
            seq.depth()
        )));
    }
    let mut rows = Vec::with_capacity(16 * (k_max + 1));
    for k in 0..=k_max {
        let e2 = ratio_enclosure(seq, Measure::Lambda2, k, r)?;
        let e3 = ratio_enclosure(seq, Measure::Lambda3, k, r)?;
        let b = return_times(seq, k)?;
        let m1 = uint_to_rat(seq.m(k + 1));
        let n1 = uint_to_rat(seq.n(k + 1));
        let m2 = uint_to_rat(seq.m(k + 2));
        let n2 = uint_to_rat(seq.n(k + 2));
        let one = Rational::one();
        let c = |x: i64| rat(x, 1);

        let mut push = |id: &'static str, j: usize, enc: &RatioEnclosure, rel: Relation, bound: Rational| {
            let (lo, hi) = component(enc, j);
            rows.push(judge(id, k, rel, bound, lo, hi));
        };
        push("L3I2big", 2, &e3, Relation::Ge, &m1 / (c(2) * &n1 * &n2));
        push("L3I2small", 2, &e3, Relation::Le, c(2) * &m1 / ((&n2 + &one) * (&n1 + &one)));
        push("L3I3big", 3, &e3, Relation::Ge, &one - c(3) / &n1);
        push("L3I4small", 4, &e3, Relation::Le, &one / &n1);
        push("L3I4big", 4, &e3, Relation::Ge, &one / (c(2) * &n1));
        push("L3I1small", 1, &e3, Relation::Le, &one / &n1);
        push("L3I1big", 1, &e3, Relation::Ge, &one / (c(3) * &n1));
        push("L2I2big", 2, &e2, Relation::Gt, &m1 / (c(4) * (&n1 + &m1 + c(2))));
        push("L2I3small", 3, &e2, Relation::Le, c(4) * &n1 / &m1);
        push("L2I3big", 3, &e2, Relation::Ge, &n1 / (c(2) * &m1));
        push("L2I4big", 4, &e2, Relation::Gt, &one / (c(2) * &m1));
        push("L2I4small", 4, &e2, Relation::Lt, c(4) / &m1);
        push("L2I1small", 1, &e2, Relation::Lt, (c(16) * &n2 + c(16)) / (&m1 * &m2));
        push("L2I1big", 1, &e2, Relation::Gt, &n2 / (c(4) * &m1 * &m2));

        let den = b.as_rats();
        for (id, j, enc, bound) in [("L3bigorbit", 3, &e3, rat(1, 8)), ("L2bigorbit", 2, &e2, rat(1, 4))] {
            let mut num: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
            num[j - 1] = den[j - 1].clone();
            let (lo, hi) = enc.range(&num, &den);
            rows.push(judge(id, k, Relation::Gt, bound, lo, hi));
        }
    }
    Ok(LemmaSuite { truncation: r, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keane::RuleTag;

    #[test]
    fn judge_classifies() {
        let b = rat(1, 2);
        assert_eq!(judge("x", 0, Relation::Ge, b.clone(), rat(1, 2), rat(1, 1)).verdict, Verdict::Pass);
        assert_eq!(judge("x", 0, Relation::Gt, b.clone(), rat(1, 2), rat(1, 1)).verdict, Verdict::Inconclusive);
        assert_eq!(judge("x", 0, Relation::Le, b.clone(), rat(2, 3), rat(1, 1)).verdict, Verdict::Fail);
        assert_eq!(judge("x", 0, Relation::Lt, b, rat(0, 1), rat(1, 3)).verdict, Verdict::Pass);
    }

    #[test]
    fn minimal_sequence_suite() {
        let mut pairs = Vec::new();
        let mut n = 10u64;
        for _ in 0..7 {
            let m = 3 * (n + 1);
            pairs.push((m, n));
            n = 2 * m - 1;
        }
        let seq = ParamSeq::from_u64(RuleTag::MinimalAdmissible, &pairs).unwrap();
        let suite = lemma_suite(&seq, 4, 3).unwrap();
        assert_eq!(suite.rows.len(), 80);
        assert_eq!(suite.count(Verdict::Fail), 0);
        assert!(suite.pass_fraction() >= rat(4, 5));
        assert!(suite.to_csv(6).lines().count() == 81);
    }
}
