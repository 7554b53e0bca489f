//! Rokhlin towers over the pieces of `I^(k)` and measure enclosures of
//! arbitrary subintervals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{default_truncation, ratio_enclosure, Measure, MeasureValue, RatioEnclosure};
use crate::error::{KeaneError, Result};
use crate::iet::{step_budget_from_env, HalfOpen};
use crate::keane::{return_times, KeaneIet, ParamSeq, ReturnTimes};
use crate::num::Rational;

/// One floor `T^height(I_tower^(k))` of the level-`k` towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Floor {
    pub left: Rational,
    pub tower: usize,
    pub height: u64,
}

/// All floors of the four towers over `I^(k)`, sorted by position.
#[derive(Debug, Clone)]
pub struct TowerDecomposition {
    pub level: usize,
    pub return_times: ReturnTimes,
    /// Floor widths per tower, indexed by name `j - 1`.
    pub widths: [Rational; 4],
    pub floors: Vec<Floor>,
    /// Left endpoints of the tower bases `I_j^(k)`.
    pub bases: [Rational; 4],
    /// `T^{b_{k,j}}(x) - x` for `x` in `I_j^(k)`.
    pub return_shift: [Rational; 4],
    /// `prefix[i][j]`: floors of tower `j + 1` among `floors[..i]`.
    prefix: Vec<[u64; 4]>,
}

impl TowerDecomposition {
    pub fn build(kiet: &KeaneIet, k: usize, budget: u64) -> Result<Self> {
        let geom = kiet.level(k)?.clone();
        let b = return_times(&kiet.seq, k)?;
        let heights: Vec<u64> = (1..=4)
            .map(|j| b.get(j).to_u64().filter(|&h| h <= budget))
            .collect::<Option<_>>()
            .ok_or_else(|| KeaneError::Budget { what: format!("tower floors at level {k}"), limit: budget })?;
        let total: u64 = heights.iter().sum();
        if total > budget {
            return Err(KeaneError::Budget { what: format!("tower floors at level {k}"), limit: budget });
        }
        let mut floors = Vec::with_capacity(total as usize);
        let mut return_shift: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        for j in 1..=4 {
            let mut x = geom.piece_left[j - 1].clone();
            for height in 0..heights[j - 1] {
                let next = kiet.iet.step(&x).0;
                floors.push(Floor { left: x, tower: j, height });
                x = next;
            }
            if !geom.interval.contains(&x) {
                return Err(KeaneError::domain(format!("tower {j} at level {k} does not return to the base")));
            }
            return_shift[j - 1] = x - &geom.piece_left[j - 1];
        }
        floors.sort_by(|a, b| a.left.cmp(&b.left));
        let widths = geom.piece_len.clone();
        // Floors of a Rokhlin partition must tile [0,1) without gaps.
        let mut edge = Rational::zero();
        for f in &floors {
            if f.left != edge {
                return Err(KeaneError::domain(format!("level {k} towers do not tile the interval")));
            }
            edge += &widths[f.tower - 1];
        }
        let mut prefix = Vec::with_capacity(floors.len() + 1);
        let mut acc = [0u64; 4];
        prefix.push(acc);
        for f in &floors {
            acc[f.tower - 1] += 1;
            prefix.push(acc);
        }
        Ok(TowerDecomposition { level: k, return_times: b, widths, floors, bases: geom.piece_left, return_shift, prefix })
    }

    pub fn floor_right(&self, i: usize) -> Rational {
        &self.floors[i].left + &self.widths[self.floors[i].tower - 1]
    }

    /// Index of the floor containing `x`.
    pub fn floor_index(&self, x: &Rational) -> Option<usize> {
        let i = self.floors.partition_point(|f| &f.left <= x);
        if i == 0 || i > self.floors.len() {
            return None;
        }
        let i = i - 1;
        (x < &self.floor_right(i)).then_some(i)
    }

    pub fn floor_of(&self, x: &Rational) -> Option<&Floor> {
        self.floor_index(x).map(|i| &self.floors[i])
    }

    /// Per-tower counts of floors inside `[a, b)` and of floors meeting it
    /// only partly.
    pub fn counts(&self, a: &Rational, b: &Rational) -> ([u64; 4], [u64; 4]) {
        let mut partial = [0u64; 4];
        if a >= b {
            return ([0; 4], partial);
        }
        let first = self.floors.partition_point(|f| &f.left < a);
        // Floors tile [0,1), so right ends are sorted as well.
        let end = self.floors.partition_point(|f| &(&f.left + &self.widths[f.tower - 1]) <= b);
        let mut full = [0u64; 4];
        if end > first {
            for j in 0..4 {
                full[j] = self.prefix[end][j] - self.prefix[first][j];
            }
        }
        let mut touched = Vec::new();
        if first > 0 && &self.floor_right(first - 1) > a {
            touched.push(first - 1);
        }
        if end < self.floors.len() && &self.floors[end].left < b && !touched.contains(&end) {
            touched.push(end);
        }
        for i in touched {
            partial[self.floors[i].tower - 1] += 1;
        }
        (full, partial)
    }
}

/// The level-`k` towers together with `λ2` and `λ3` ratio enclosures.
#[derive(Debug, Clone)]
pub struct MeasureModel {
    pub towers: TowerDecomposition,
    pub lambda2: RatioEnclosure,
    pub lambda3: RatioEnclosure,
    /// Per vertex `u`: an integer multiple `w` of `u` and `b_k·w`, so that a
    /// union of floors with counts `c` has mass `(c·w)/(b_k·w)`.
    scaled: [Vec<([BigInt; 4], BigInt)>; 2],
}

fn scale_vertices(enc: &RatioEnclosure, b: &ReturnTimes) -> Vec<([BigInt; 4], BigInt)> {
    let bi: [BigInt; 4] = std::array::from_fn(|j| BigInt::from(b.get(j + 1).clone()));
    enc.vertices
        .iter()
        .map(|u| {
            let l = u.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let w: [BigInt; 4] = std::array::from_fn(|j| u[j].numer() * (&l / u[j].denom()));
            let d = (0..4).map(|j| &w[j] * &bi[j]).sum();
            (w, d)
        })
        .collect()
}

/// `(min, max)` of `(c·w)/d` over the scaled vertices.
fn count_range(scaled: &[([BigInt; 4], BigInt)], c: &[u64; 4]) -> (Rational, Rational) {
    let vals: Vec<(BigInt, &BigInt)> = scaled
        .iter()
        .map(|(w, d)| ((0..4).map(|j| &w[j] * c[j]).sum::<BigInt>(), d))
        .collect();
    // Denominators are positive, so a/b < c/d iff a d < c b.
    let less = |a: &(BigInt, &BigInt), b: &(BigInt, &BigInt)| &a.0 * b.1 < &b.0 * a.1;
    let mut lo = &vals[0];
    let mut hi = &vals[0];
    for v in &vals[1..] {
        if less(v, lo) {
            lo = v;
        }
        if less(hi, v) {
            hi = v;
        }
    }
    (Rational::new(lo.0.clone(), lo.1.clone()), Rational::new(hi.0.clone(), hi.1.clone()))
}

impl MeasureModel {
    pub fn new(kiet: &KeaneIet, k: usize, r: usize, budget: u64) -> Result<Self> {
        let towers = TowerDecomposition::build(kiet, k, budget)?;
        let lambda2 = ratio_enclosure(&kiet.seq, Measure::Lambda2, k, r)?;
        let lambda3 = ratio_enclosure(&kiet.seq, Measure::Lambda3, k, r)?;
        let scaled = [scale_vertices(&lambda2, &towers.return_times), scale_vertices(&lambda3, &towers.return_times)];
        Ok(MeasureModel { towers, lambda2, lambda3, scaled })
    }

    pub fn enclosure(&self, measure: Measure) -> &RatioEnclosure {
        match measure {
            Measure::Lambda2 => &self.lambda2,
            Measure::Lambda3 => &self.lambda3,
        }
    }

    /// Enclosure of `λ_i([a, b))`: full floors give the lower end, full
    /// and partial floors the upper end.
    pub fn interval(&self, measure: Measure, a: &Rational, b: &Rational) -> MeasureValue {
        let (full, partial) = self.towers.counts(a, b);
        let all: [u64; 4] = std::array::from_fn(|j| full[j] + partial[j]);
        let (lo, hi) = self.count_mass(measure, &full, &all);
        let enc = self.enclosure(measure);
        MeasureValue { lo, hi, level: enc.level, truncation: enc.truncation }
    }

    /// Lower mass of floors counted by `lower` and upper mass of floors
    /// counted by `upper`.
    pub fn count_mass(&self, measure: Measure, lower: &[u64; 4], upper: &[u64; 4]) -> (Rational, Rational) {
        let scaled = &self.scaled[measure.index() - 2];
        (count_range(scaled, lower).0, count_range(scaled, upper).1)
    }

    /// Enclosure of `(λ2 + λ3)([a, b))`.
    pub fn combined(&self, a: &Rational, b: &Rational) -> MeasureValue {
        self.interval(Measure::Lambda2, a, b).add(&self.interval(Measure::Lambda3, a, b))
    }
}

/// `λ_i([a, b))` using towers of level `k` over the uniform-seed exchange
/// of depth `K` and the default truncation.
pub fn interval_measure(seq: &ParamSeq, measure: Measure, a: &Rational, b: &Rational, k: usize) -> Result<MeasureValue> {
    HalfOpen::new(a.clone(), b.clone())?;
    let kiet = KeaneIet::with_uniform_seed(seq)?;
    let model = MeasureModel::new(&kiet, k, default_truncation(seq, k), step_budget_from_env()?)?;
    Ok(model.interval(measure, a, b))
}
