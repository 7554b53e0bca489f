//! Certified enclosures of the two ergodic measures `λ2` and `λ3`.
//!
//! For a measure `λ_i`, the vector `(λ_i(I_j^(k)) / λ_i(I^(k)))_j` equals the
//! normalized product `Ā_{k+1} ... Ā_{k+r} u` where `u` is the same vector at
//! level `k+r`. The enclosure is the image of a region known to contain `u`:
//!
//! * [`EnclosureMethod::ColumnHull`] uses the whole simplex, giving the convex
//!   hull of the normalized columns of the product.
//! * [`EnclosureMethod::InvariantCone`] uses a region that every admissible
//!   tail maps into itself and that contains `e_i`: `{v_2 >= 1/4}` for `λ2`
//!   (needs `m_s >= 3 n_s`, `n_s >= 2` beyond the truncation) and
//!   `{v_1 + v_2 <= 3/n_{k+r+1}}` for `λ3` (needs `2 m_s <= n_{s+1} + 1`).
//!   Known tail pairs are checked; if one breaks its hypothesis the
//!   enclosure falls back to the column hull.
//!
//! The region is a polytope and normalization is a projective map, so the
//! image is the hull of the images of the region's vertices. Every quantity
//! of the form `(a·u)/(d·u)` with `d·u > 0` then attains its extremes at
//! those vertices, which is how all measure bounds here are evaluated.

mod lemmas;
mod tower;

pub use lemmas::{lemma_suite, LemmaRow, LemmaSuite, Relation, LEMMA_IDS};
pub use tower::{interval_measure, Floor, MeasureModel, TowerDecomposition};

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{KeaneError, Result};
use crate::keane::{normalize, return_times, ParamSeq, ReturnTimes};
use crate::num::{rat, uint_to_rat, Rational};

/// One of the two ergodic measures of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Lambda2,
    Lambda3,
}

impl Measure {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            2 => Ok(Measure::Lambda2),
            3 => Ok(Measure::Lambda3),
            _ => Err(KeaneError::domain(format!("measure index must be 2 or 3, got {i}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Measure::Lambda2 => 2,
            Measure::Lambda3 => 3,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Measure::Lambda2 => Measure::Lambda3,
            Measure::Lambda3 => Measure::Lambda2,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda{}", self.index())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnclosureMethod {
    ColumnHull,
    InvariantCone,
}

/// Component-wise enclosure of the ratio vector at level `k`, kept together
/// with the vertices that generate it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioEnclosure {
    pub level: usize,
    pub measure: Measure,
    pub truncation: usize,
    pub method: EnclosureMethod,
    /// False when a known tail pair broke the invariant-region hypothesis
    /// and the column hull was used instead.
    pub tail_hypotheses_hold: bool,
    pub vertices: Vec<[Rational; 4]>,
    pub lo: [Rational; 4],
    pub hi: [Rational; 4],
}

impl RatioEnclosure {
    /// Extremes of `(num·u)/(den·u)` over the enclosure. `den·u` must be
    /// positive on the simplex.
    pub fn range(&self, num: &[Rational; 4], den: &[Rational; 4]) -> (Rational, Rational) {
        let vals: Vec<Rational> = self
            .vertices
            .iter()
            .map(|u| {
                let a: Rational = (0..4).map(|j| &num[j] * &u[j]).sum();
                let d: Rational = (0..4).map(|j| &den[j] * &u[j]).sum();
                a / d
            })
            .collect();
        let lo = vals.iter().min().expect("nonempty vertex set").clone();
        let hi = vals.iter().max().expect("nonempty vertex set").clone();
        (lo, hi)
    }

    pub fn contains(&self, v: &[Rational; 4]) -> bool {
        (0..4).all(|j| self.lo[j] <= v[j] && v[j] <= self.hi[j])
    }

    pub fn width(&self, j: usize) -> Rational {
        &self.hi[j - 1] - &self.lo[j - 1]
    }
}

/// Default truncation: at most 4, leaving one pair beyond the truncated
/// product when the sequence is long enough, since the `λ3` region at level
/// `k + r` is only sharp when `n_{k+r+1}` is known.
pub fn default_truncation(seq: &ParamSeq, k: usize) -> usize {
    let avail = seq.depth().saturating_sub(k);
    if avail >= 3 {
        (avail - 1).min(4)
    } else {
        avail
    }
}

pub fn ratio_enclosure(seq: &ParamSeq, measure: Measure, k: usize, r: usize) -> Result<RatioEnclosure> {
    ratio_enclosure_with(seq, measure, k, r, EnclosureMethod::InvariantCone)
}

pub fn ratio_enclosure_with(
    seq: &ParamSeq,
    measure: Measure,
    k: usize,
    r: usize,
    method: EnclosureMethod,
) -> Result<RatioEnclosure> {
    if r < 2 {
        return Err(KeaneError::domain(format!("truncation must be at least 2, got {r}")));
    }
    if k + r > seq.depth() {
        return Err(KeaneError::domain(format!(
            "level {k} with truncation {r} needs {} pairs, sequence has {}",
            k + r,
            seq.depth()
        )));
    }
    let tail = k + r;
    let (region, used, holds) = match method {
        EnclosureMethod::ColumnHull => (simplex_vertices(), EnclosureMethod::ColumnHull, true),
        EnclosureMethod::InvariantCone => {
            if tail_hypotheses(seq, measure, tail) {
                (cone_vertices(seq, measure, tail), EnclosureMethod::InvariantCone, true)
            } else {
                (simplex_vertices(), EnclosureMethod::ColumnHull, false)
            }
        }
    };
    let product = seq.product(k, tail);
    let vertices: Vec<[Rational; 4]> = region.iter().map(|w| normalize(&product.apply_rat(w))).collect();
    let lo = std::array::from_fn(|j| vertices.iter().map(|v| &v[j]).min().expect("nonempty").clone());
    let hi = std::array::from_fn(|j| vertices.iter().map(|v| &v[j]).max().expect("nonempty").clone());
    Ok(RatioEnclosure { level: k, measure, truncation: r, method: used, tail_hypotheses_hold: holds, vertices, lo, hi })
}

fn unit(j: usize) -> [Rational; 4] {
    std::array::from_fn(|i| if i == j { Rational::one() } else { Rational::zero() })
}

fn simplex_vertices() -> Vec<[Rational; 4]> {
    (0..4).map(unit).collect()
}

fn mix(a: usize, b: usize, weight_a: &Rational) -> [Rational; 4] {
    let mut v: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    v[a] += weight_a;
    v[b] += Rational::one() - weight_a;
    v
}

fn cone_vertices(seq: &ParamSeq, measure: Measure, tail: usize) -> Vec<[Rational; 4]> {
    match measure {
        Measure::Lambda2 => {
            let quarter = rat(1, 4);
            let mut vs = vec![unit(1)];
            vs.extend([0, 2, 3].into_iter().map(|j| mix(1, j, &quarter)));
            vs
        }
        Measure::Lambda3 => {
            let eps = if tail < seq.depth() {
                let bound = rat(3, 1) / uint_to_rat(seq.n(tail + 1));
                bound.min(Rational::one())
            } else {
                Rational::one()
            };
            let mut vs = vec![unit(2), unit(3)];
            for a in [0, 1] {
                for b in [2, 3] {
                    vs.push(mix(a, b, &eps));
                }
            }
            vs
        }
    }
}

/// Whether the known pairs beyond `tail` satisfy the invariance hypotheses
/// of the region used for `measure` at level `tail`.
pub fn tail_hypotheses(seq: &ParamSeq, measure: Measure, tail: usize) -> bool {
    let depth = seq.depth();
    match measure {
        Measure::Lambda2 => (tail + 1..=depth)
            .all(|s| *seq.m(s) >= BigUint::from(3u32) * seq.n(s) && *seq.n(s) >= BigUint::from(2u32)),
        Measure::Lambda3 => (tail + 1..depth).all(|s| BigUint::from(2u32) * seq.m(s) <= seq.n(s + 1) + 1u32),
    }
}

/// An enclosure `[lo, hi]` of a single measure value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureValue {
    pub lo: Rational,
    pub hi: Rational,
    pub level: usize,
    pub truncation: usize,
}

impl MeasureValue {
    pub fn exact(v: Rational, level: usize) -> Self {
        MeasureValue { lo: v.clone(), hi: v, level, truncation: 0 }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_within(&self, other: &MeasureValue) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn add(&self, other: &MeasureValue) -> MeasureValue {
        MeasureValue {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            level: self.level.min(other.level),
            truncation: self.truncation.min(other.truncation),
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

fn b_rats(b: &ReturnTimes) -> [Rational; 4] {
    b.as_rats()
}

fn ones() -> [Rational; 4] {
    std::array::from_fn(|_| Rational::one())
}

/// `λ_i(I_j^(k))`.
pub fn piece_measure(enc: &RatioEnclosure, b: &ReturnTimes, j: usize) -> MeasureValue {
    let mut num: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    num[j - 1] = Rational::one();
    let (lo, hi) = enc.range(&num, &b_rats(b));
    MeasureValue { lo, hi, level: enc.level, truncation: enc.truncation }
}

/// `λ_i(O(I_j^(k))) = b_{k,j} λ_i(I_j^(k))`.
pub fn orbit_measure(enc: &RatioEnclosure, b: &ReturnTimes, j: usize) -> MeasureValue {
    let mut num: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    num[j - 1] = uint_to_rat(b.get(j));
    let (lo, hi) = enc.range(&num, &b_rats(b));
    MeasureValue { lo, hi, level: enc.level, truncation: enc.truncation }
}

/// `λ_i` of a union of towers given by per-tower floor counts.
pub fn counted_measure(enc: &RatioEnclosure, b: &ReturnTimes, counts: &[Rational; 4]) -> (Rational, Rational) {
    enc.range(counts, &b_rats(b))
}

/// The enclosure of `λ_i(I^(k))` with the bound checks that accompany it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMeasure {
    pub measure: Measure,
    pub value: MeasureValue,
    /// `(lower, upper)` stated in terms of return times: `(1/(4 b_{k,2}), 1/b_{k,2})`
    /// for `λ2` and `(1/(8 b_{k,3}), 1/b_{k,3})` for `λ3`, open at both ends.
    pub stated_bounds: (Rational, Rational),
    pub within_stated_bounds: bool,
    /// For `λ2`, the sandwich `1/b_{k,2} <= λ2(I^(k)) <= 4/b_{k,2}` that
    /// follows from the tower partition and `λ2(O(I_2^(k))) > 1/4`.
    pub tower_bounds: (Rational, Rational),
    pub within_tower_bounds: bool,
    pub precision_warning: bool,
}

/// Default `hi/lo` ratio above which an enclosure is flagged as imprecise.
pub const DEFAULT_PRECISION_RATIO: i64 = 2;

pub fn level_measure(seq: &ParamSeq, measure: Measure, k: usize, r: usize) -> Result<LevelMeasure> {
    let b = return_times(seq, k)?;
    let value = if k == 0 {
        MeasureValue::exact(Rational::one(), 0)
    } else {
        let enc = ratio_enclosure(seq, measure, k, r)?;
        let (lo, hi) = enc.range(&ones(), &b_rats(&b));
        MeasureValue { lo, hi, level: k, truncation: r }
    };
    Ok(level_measure_report(measure, &b, value))
}

fn level_measure_report(measure: Measure, b: &ReturnTimes, value: MeasureValue) -> LevelMeasure {
    let b2 = uint_to_rat(b.get(2));
    let (stated, tower) = match measure {
        Measure::Lambda2 => {
            let stated = (Rational::one() / (rat(4, 1) * &b2), Rational::one() / &b2);
            let tower = (Rational::one() / &b2, rat(4, 1) / &b2);
            (stated, tower)
        }
        Measure::Lambda3 => {
            let b3 = uint_to_rat(b.get(3));
            let stated = (Rational::one() / (rat(8, 1) * &b3), Rational::one() / &b3);
            // Every measure satisfies 1/b_{k,2} <= μ(I^(k)) <= 1.
            let tower = (Rational::one() / &b2, Rational::one());
            (stated, tower)
        }
    };
    let within_stated = stated.0 < value.lo && value.hi < stated.1;
    let within_tower = tower.0 <= value.lo && value.hi <= tower.1;
    let precision_warning = value.hi > &value.lo * rat(DEFAULT_PRECISION_RATIO, 1);
    LevelMeasure {
        measure,
        value,
        stated_bounds: stated,
        within_stated_bounds: within_stated,
        tower_bounds: tower,
        within_tower_bounds: within_tower,
        precision_warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keane::RuleTag;

    fn minimal(depth: usize) -> ParamSeq {
        let mut pairs = Vec::new();
        let mut n = 10u64;
        for _ in 0..depth {
            let m = 3 * (n + 1);
            pairs.push((m, n));
            n = 2 * m - 1;
        }
        ParamSeq::from_u64(RuleTag::MinimalAdmissible, &pairs).unwrap()
    }

    #[test]
    fn enclosure_contains_its_generators_and_sums() {
        let seq = minimal(6);
        for measure in [Measure::Lambda2, Measure::Lambda3] {
            let enc = ratio_enclosure(&seq, measure, 1, 3).unwrap();
            assert!(enc.tail_hypotheses_hold);
            for v in &enc.vertices {
                assert!(enc.contains(v));
                assert_eq!(v.iter().sum::<Rational>(), Rational::one());
            }
            let slo: Rational = enc.lo.iter().sum();
            let shi: Rational = enc.hi.iter().sum();
            assert!(slo <= Rational::one() && Rational::one() <= shi);
        }
    }

    #[test]
    fn identical_columns_collapse() {
        // A region consisting of one point yields lo == hi.
        let seq = minimal(4);
        let enc = ratio_enclosure(&seq, Measure::Lambda2, 0, 2).unwrap();
        let one_vertex = RatioEnclosure { vertices: vec![enc.vertices[0].clone()], ..enc.clone() };
        let (lo, hi) = one_vertex.range(&ones(), &ones());
        assert_eq!(lo, hi);
    }

    #[test]
    fn short_sequence_is_rejected() {
        let seq = minimal(3);
        assert!(ratio_enclosure(&seq, Measure::Lambda3, 2, 2).is_err());
        assert!(ratio_enclosure(&seq, Measure::Lambda3, 0, 1).is_err());
    }

    #[test]
    fn broken_tail_falls_back_to_hull() {
        // m_3 < 3 n_3 breaks the λ2 region hypothesis at tail level 2.
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(33, 10), (198, 65), (100, 395)]).unwrap();
        let enc = ratio_enclosure(&seq, Measure::Lambda2, 0, 2).unwrap();
        assert!(!enc.tail_hypotheses_hold);
        assert_eq!(enc.method, EnclosureMethod::ColumnHull);
    }

    #[test]
    fn level_zero_is_one() {
        let seq = minimal(4);
        let lm = level_measure(&seq, Measure::Lambda2, 0, 2).unwrap();
        assert_eq!(lm.value.lo, Rational::one());
        assert_eq!(lm.value.hi, Rational::one());
    }

    #[test]
    fn lambda3_level_measure_in_stated_window() {
        let seq = minimal(7);
        for k in 1..=3 {
            let lm = level_measure(&seq, Measure::Lambda3, k, 3).unwrap();
            assert!(lm.within_stated_bounds, "k={k}");
            let lm2 = level_measure(&seq, Measure::Lambda2, k, 3).unwrap();
            assert!(lm2.within_tower_bounds, "k={k}");
        }
    }
}
