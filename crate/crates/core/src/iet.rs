//! Interval exchange transformations on `[0,1)` with exact rational
//! arithmetic: evaluation, orbits and first-return (induced) maps.
//!
//! Intervals are half-open everywhere, so a discontinuity point belongs to the
//! interval on its right and `apply` is total on `[0,1)`.

use num_traits::{One, Zero};

use crate::error::{KeaneError, Result};
use crate::num::{fmt_rational, Rational};

/// Default bound on the number of single-interval applications performed by
/// any orbit or first-return computation.
pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_STEP_BUDGET`].
pub const STEP_BUDGET_ENV: &str = "KEANE_STEP_BUDGET";

/// The step budget from `KEANE_STEP_BUDGET`, or the default when unset.
pub fn step_budget_from_env() -> Result<u64> {
    match std::env::var(STEP_BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| KeaneError::Parse(format!("{STEP_BUDGET_ENV}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_STEP_BUDGET),
    }
}

/// A permutation in one-line notation: `images[j-1] = π(j)`, the position
/// (1-based) that interval `I_j` occupies after the exchange.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n < 2 {
            return Err(KeaneError::domain("a permutation needs at least two letters"));
        }
        let mut seen = vec![false; n];
        for &p in &images {
            if p == 0 || p > n || seen[p - 1] {
                return Err(KeaneError::domain(format!("{images:?} is not a permutation of 1..{n}")));
            }
            seen[p - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds the permutation whose image lists the intervals in the given
    /// left-to-right order: `order[p-1]` is the interval placed at position `p`.
    pub fn from_image_order(order: &[usize]) -> Result<Self> {
        let probe = Permutation::new(order.to_vec())?;
        Ok(probe.inverse())
    }

    /// The Keane permutation: the image of `[0,1)` lists `I_4, I_2, I_1, I_3`.
    pub fn keane() -> Self {
        Permutation::from_image_order(&[4, 2, 1, 3]).expect("valid permutation")
    }

    pub fn identity(n: usize) -> Result<Self> {
        Permutation::new((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `π(j)` for 1-based `j`.
    pub fn image(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (j, &p) in self.images.iter().enumerate() {
            inv[p - 1] = j + 1;
        }
        Permutation { images: inv }
    }
}

/// A half-open rational interval `[left, right)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfOpen {
    pub left: Rational,
    pub right: Rational,
}

impl HalfOpen {
    pub fn new(left: Rational, right: Rational) -> Result<Self> {
        if left >= right {
            return Err(KeaneError::domain(format!(
                "empty interval [{}, {})",
                fmt_rational(&left),
                fmt_rational(&right)
            )));
        }
        Ok(HalfOpen { left, right })
    }

    pub fn unit() -> Self {
        HalfOpen { left: Rational::zero(), right: Rational::one() }
    }

    pub fn len(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.left <= x && x < &self.right
    }
}

/// An interval exchange transformation of `[0,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iet {
    perm: Permutation,
    lengths: Vec<Rational>,
    lefts: Vec<Rational>,
    image_lefts: Vec<Rational>,
}

impl Iet {
    pub fn new(perm: Permutation, lengths: Vec<Rational>) -> Result<Self> {
        if perm.len() != lengths.len() {
            return Err(KeaneError::domain(format!(
                "{} lengths for a permutation on {} letters",
                lengths.len(),
                perm.len()
            )));
        }
        if let Some(l) = lengths.iter().find(|l| !(**l > Rational::zero())) {
            return Err(KeaneError::domain(format!("length {} is not positive", fmt_rational(l))));
        }
        let total: Rational = lengths.iter().sum();
        if !total.is_one() {
            return Err(KeaneError::domain(format!("lengths sum to {}, not 1", fmt_rational(&total))));
        }
        let n = lengths.len();
        let mut lefts = Vec::with_capacity(n);
        let mut acc = Rational::zero();
        for l in &lengths {
            lefts.push(acc.clone());
            acc += l;
        }
        let inv = perm.inverse();
        let mut image_lefts = vec![Rational::zero(); n];
        let mut acc = Rational::zero();
        for p in 1..=n {
            let j = inv.image(p);
            image_lefts[j - 1] = acc.clone();
            acc += &lengths[j - 1];
        }
        Ok(Iet { perm, lengths, lefts, image_lefts })
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    /// `I_j` for 1-based `j`.
    pub fn interval(&self, j: usize) -> HalfOpen {
        HalfOpen { left: self.lefts[j - 1].clone(), right: &self.lefts[j - 1] + &self.lengths[j - 1] }
    }

    /// Left endpoints of `I_2, ..., I_n`: the discontinuities of `T`.
    pub fn discontinuities(&self) -> &[Rational] {
        &self.lefts[1..]
    }

    /// 1-based index of the interval containing `x`, or `None` off `[0,1)`.
    pub fn interval_index(&self, x: &Rational) -> Option<usize> {
        if x < &Rational::zero() || x >= &Rational::one() {
            return None;
        }
        Some(self.lefts.partition_point(|l| l <= x))
    }

    /// Translation applied to points of `I_j`.
    pub fn shift(&self, j: usize) -> Rational {
        &self.image_lefts[j - 1] - &self.lefts[j - 1]
    }

    pub fn apply(&self, x: &Rational) -> Result<Rational> {
        let j = self
            .interval_index(x)
            .ok_or_else(|| KeaneError::domain(format!("{} is outside [0,1)", fmt_rational(x))))?;
        Ok(x + self.shift(j))
    }

    /// `T(x)` together with the interval index of `x`; `x` must lie in `[0,1)`.
    pub(crate) fn step(&self, x: &Rational) -> (Rational, usize) {
        let j = self.lefts.partition_point(|l| l <= x);
        (x - &self.lefts[j - 1] + &self.image_lefts[j - 1], j)
    }

    /// The inverse exchange `T^{-1}`.
    pub fn inverse(&self) -> Iet {
        let inv = self.perm.inverse();
        let lengths = (1..=self.n()).map(|p| self.lengths[inv.image(p) - 1].clone()).collect();
        Iet::new(inv, lengths).expect("inverse of a valid exchange is valid")
    }

    /// The first `steps + 1` points of the orbit of `x` with their interval symbols.
    pub fn orbit(&self, x: &Rational, steps: u64, budget: u64) -> Result<Vec<OrbitPoint>> {
        if steps > budget {
            return Err(KeaneError::Budget { what: format!("orbit of length {steps}"), limit: budget });
        }
        let mut j = self
            .interval_index(x)
            .ok_or_else(|| KeaneError::domain(format!("{} is outside [0,1)", fmt_rational(x))))?;
        let mut out = Vec::with_capacity(steps as usize + 1);
        let mut cur = x.clone();
        for _ in 0..steps {
            let next = &cur + self.shift(j);
            out.push(OrbitPoint { point: cur, interval: j });
            cur = next;
            j = self.lefts.partition_point(|l| l <= &cur);
        }
        out.push(OrbitPoint { point: cur, interval: j });
        Ok(out)
    }

    /// First-return map of `T` to `sub`.
    ///
    /// The pieces are found by carrying subintervals forward and splitting
    /// them wherever an image meets a discontinuity of `T` or an endpoint of
    /// `sub`, which pulls every relevant cut point back exactly.
    pub fn first_return(&self, sub: &HalfOpen, budget: u64) -> Result<InducedMap> {
        if sub.left < Rational::zero() || sub.right > Rational::one() || sub.left >= sub.right {
            return Err(KeaneError::domain("sub-interval must be a nonempty subset of [0,1)"));
        }
        let n = self.n();
        let mut used: u64 = 0;
        let mut active = vec![Segment {
            start: sub.left.clone(),
            len: sub.len(),
            cur: sub.left.clone(),
            steps: 0,
            visits: vec![0; n],
        }];
        let mut done: Vec<Segment> = Vec::new();
        while let Some(mut seg) = active.pop() {
            loop {
                let j = self.lefts.partition_point(|l| l <= &seg.cur);
                let right = &self.lefts[j - 1] + &self.lengths[j - 1];
                let end = &seg.cur + &seg.len;
                if end > right {
                    let head = &right - &seg.cur;
                    active.push(Segment {
                        start: &seg.start + &head,
                        len: &seg.len - &head,
                        cur: right,
                        steps: seg.steps,
                        visits: seg.visits.clone(),
                    });
                    seg.len = head;
                }
                used += 1;
                if used > budget {
                    return Err(KeaneError::Budget { what: "first-return computation".into(), limit: budget });
                }
                seg.visits[j - 1] += 1;
                seg.cur += self.shift(j);
                seg.steps += 1;

                let end = &seg.cur + &seg.len;
                if end <= sub.left || seg.cur >= sub.right {
                    continue;
                }
                // Peel off the parts hanging outside `sub`; they keep travelling.
                if seg.cur < sub.left {
                    let head = &sub.left - &seg.cur;
                    active.push(Segment {
                        start: seg.start.clone(),
                        len: head.clone(),
                        cur: seg.cur.clone(),
                        steps: seg.steps,
                        visits: seg.visits.clone(),
                    });
                    seg.start += &head;
                    seg.len -= &head;
                    seg.cur = sub.left.clone();
                }
                let end = &seg.cur + &seg.len;
                if end > sub.right {
                    let inside = &sub.right - &seg.cur;
                    active.push(Segment {
                        start: &seg.start + &inside,
                        len: &seg.len - &inside,
                        cur: sub.right.clone(),
                        steps: seg.steps,
                        visits: seg.visits.clone(),
                    });
                    seg.len = inside;
                }
                done.push(seg);
                break;
            }
        }
        done.sort_by(|a, b| a.start.cmp(&b.start));
        let mut pieces: Vec<InducedPiece> = Vec::with_capacity(done.len());
        for seg in done {
            let translation = &seg.cur - &seg.start;
            if let Some(last) = pieces.last_mut() {
                let last_translation = &last.image_left - &last.left;
                if &last.left + &last.length == seg.start
                    && last.return_time == seg.steps
                    && last.visits == seg.visits
                    && last_translation == translation
                {
                    last.length += &seg.len;
                    continue;
                }
            }
            pieces.push(InducedPiece {
                left: seg.start,
                length: seg.len,
                image_left: seg.cur,
                return_time: seg.steps,
                visits: seg.visits,
            });
        }
        InducedMap::assemble(sub.clone(), pieces)
    }
}

#[derive(Debug, Clone)]
struct Segment {
    start: Rational,
    len: Rational,
    cur: Rational,
    steps: u64,
    visits: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPoint {
    pub point: Rational,
    /// 1-based index of the interval containing `point`.
    pub interval: usize,
}

/// One exchanged piece of an induced map, in absolute coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedPiece {
    pub left: Rational,
    pub length: Rational,
    /// Left endpoint of `T^r(piece)` where `r` is the return time.
    pub image_left: Rational,
    pub return_time: u64,
    /// `visits[i]` counts the times `0..r` at which the piece lies in `I_{i+1}`.
    pub visits: Vec<u64>,
}

/// The first-return map of an exchange to a sub-interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub sub_interval: HalfOpen,
    /// Pieces in left-to-right order.
    pub pieces: Vec<InducedPiece>,
    /// The induced exchange rescaled affinely to `[0,1)`.
    pub induced: Iet,
    pub return_times: Vec<u64>,
    /// `landing_pattern[i][j]`: visits of piece `j` to `I_{i+1}` before returning.
    pub landing_pattern: Vec<Vec<u64>>,
}

impl InducedMap {
    fn assemble(sub: HalfOpen, pieces: Vec<InducedPiece>) -> Result<Self> {
        let width = sub.len();
        let lengths: Vec<Rational> = pieces.iter().map(|p| &p.length / &width).collect();
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&a, &b| pieces[a].image_left.cmp(&pieces[b].image_left));
        let mut images = vec![0; pieces.len()];
        for (pos, &j) in order.iter().enumerate() {
            images[j] = pos + 1;
        }
        let induced = if pieces.len() >= 2 {
            Iet::new(Permutation::new(images)?, lengths)?
        } else {
            // A single piece returns onto itself; represent it as a trivial
            // two-letter identity split at the midpoint.
            let half = crate::num::rat(1, 2);
            Iet::new(Permutation::identity(2)?, vec![half.clone(), half])?
        };
        let rows = pieces.first().map_or(0, |p| p.visits.len());
        let landing_pattern = (0..rows).map(|i| pieces.iter().map(|p| p.visits[i]).collect()).collect();
        let return_times = pieces.iter().map(|p| p.return_time).collect();
        Ok(InducedMap { sub_interval: sub, pieces, induced, return_times, landing_pattern })
    }

    /// Maps a point of the rescaled induced exchange back to absolute coordinates.
    pub fn to_absolute(&self, y: &Rational) -> Rational {
        &self.sub_interval.left + y * self.sub_interval.len()
    }

    /// Lebesgue measure of the union of the towers over the pieces.
    pub fn tower_mass(&self) -> Rational {
        self.pieces.iter().map(|p| &p.length * Rational::from_integer(p.return_time.into())).sum()
    }
}
