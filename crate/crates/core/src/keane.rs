//! Keane's construction: the matrices `A_{m,n}`, parameter sequences, the
//! length vectors they generate and the return times `b_{k,i}`.
//!
//! The symbol `(4213)` lists the intervals in the order they appear after the
//! exchange, so the exchange is [`Permutation::keane`]. Subintervals of each
//! inducing interval `I^(k)` are named in reverse order at every level, which
//! makes their left-to-right order alternate: `1,2,3,4` at even levels and
//! `4,3,2,1` at odd levels. `I^(k+1)` is the piece named 4 of `I^(k)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{KeaneError, Result};
use crate::iet::{HalfOpen, Iet, Permutation};
use crate::num::{fmt_rational, parse_rational, uint_to_rat, Rational};

/// A 4x4 matrix of nonnegative big integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat4(pub [[BigUint; 4]; 4]);

impl Mat4 {
    pub fn identity() -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { BigUint::one() } else { BigUint::zero() })))
    }

    pub fn mul(&self, rhs: &Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|l| &self.0[i][l] * &rhs.0[l][j]).sum())
        }))
    }

    pub fn col_sums(&self) -> [BigUint; 4] {
        std::array::from_fn(|j| (0..4).map(|i| &self.0[i][j]).sum())
    }

    pub fn column(&self, j: usize) -> [BigUint; 4] {
        std::array::from_fn(|i| self.0[i][j].clone())
    }

    pub fn apply_int(&self, v: &[BigUint; 4]) -> [BigUint; 4] {
        std::array::from_fn(|i| (0..4).map(|j| &self.0[i][j] * &v[j]).sum())
    }

    pub fn apply_rat(&self, v: &[Rational; 4]) -> [Rational; 4] {
        std::array::from_fn(|i| (0..4).map(|j| uint_to_rat(&self.0[i][j]) * &v[j]).sum())
    }

    /// Row vector times matrix.
    pub fn left_apply_int(&self, row: &[BigUint; 4]) -> [BigUint; 4] {
        std::array::from_fn(|j| (0..4).map(|i| &row[i] * &self.0[i][j]).sum())
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        &self.0[i][j]
    }
}

/// `A_{m,n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeaneMatrix {
    pub m: BigUint,
    pub n: BigUint,
    pub entries: Mat4,
}

pub fn keane_matrix(m: &BigUint, n: &BigUint) -> Result<KeaneMatrix> {
    if m.is_zero() || n.is_zero() {
        return Err(KeaneError::domain(format!("A_{{m,n}} needs m, n >= 1 (got m={m}, n={n})")));
    }
    let z = BigUint::zero;
    let o = BigUint::one;
    let entries = Mat4([
        [z(), z(), o(), o()],
        [m - 1u32, m.clone(), z(), z()],
        [n.clone(), n.clone(), n - 1u32, n.clone()],
        [o(), o(), o(), o()],
    ]);
    Ok(KeaneMatrix { m: m.clone(), n: n.clone(), entries })
}

/// Which value a flip-rule coordinate is steered towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipChoice {
    Zero,
    One,
    /// Smallest admissible choice.
    Free,
}

impl FlipChoice {
    fn symbol(self) -> char {
        match self {
            FlipChoice::Zero => '0',
            FlipChoice::One => '1',
            FlipChoice::Free => '-',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            '0' => Some(FlipChoice::Zero),
            '1' => Some(FlipChoice::One),
            '-' | 'x' => Some(FlipChoice::Free),
            _ => None,
        }
    }
}

/// Provenance label of a parameter sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Explicit,
    /// `flip(a,b)` targets `(dim(λ2, d_λ3), dim(λ3, d_λ2)) = (a, b)`.
    Flip { lambda2: FlipChoice, lambda3: FlipChoice },
    Alpha2(Rational),
    Alpha3(Rational),
    Generic,
    Appendix,
    MinimalAdmissible,
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::Explicit => f.write_str("explicit"),
            RuleTag::Flip { lambda2, lambda3 } => write!(f, "flip({},{})", lambda2.symbol(), lambda3.symbol()),
            RuleTag::Alpha2(a) => write!(f, "alpha2({})", fmt_rational(a)),
            RuleTag::Alpha3(a) => write!(f, "alpha3({})", fmt_rational(a)),
            RuleTag::Generic => f.write_str("generic"),
            RuleTag::Appendix => f.write_str("appendix"),
            RuleTag::MinimalAdmissible => f.write_str("minimal-admissible"),
        }
    }
}

impl FromStr for RuleTag {
    type Err = KeaneError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || KeaneError::Parse(format!("unknown rule tag {s:?}"));
        match s {
            "explicit" => return Ok(RuleTag::Explicit),
            "generic" => return Ok(RuleTag::Generic),
            "appendix" => return Ok(RuleTag::Appendix),
            "minimal-admissible" => return Ok(RuleTag::MinimalAdmissible),
            _ => {}
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        match head {
            "flip" => {
                let (a, b) = inner.split_once(',').ok_or_else(bad)?;
                let pick = |t: &str| {
                    let mut cs = t.trim().chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => FlipChoice::from_symbol(c).ok_or_else(bad),
                        _ => Err(bad()),
                    }
                };
                Ok(RuleTag::Flip { lambda2: pick(a)?, lambda3: pick(b)? })
            }
            "alpha2" => Ok(RuleTag::Alpha2(parse_rational(inner)?)),
            "alpha3" => Ok(RuleTag::Alpha3(parse_rational(inner)?)),
            _ => Err(bad()),
        }
    }
}

/// A finite parameter sequence `(m_1,n_1), ..., (m_K,n_K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSeq {
    pub rule: RuleTag,
    pub pairs: Vec<(BigUint, BigUint)>,
}

impl ParamSeq {
    pub fn new(rule: RuleTag, pairs: Vec<(BigUint, BigUint)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(KeaneError::domain("a parameter sequence needs at least one pair"));
        }
        if let Some((k, _)) = pairs.iter().enumerate().find(|(_, (m, n))| m.is_zero() || n.is_zero()) {
            return Err(KeaneError::domain(format!("m_{0} and n_{0} must be positive", k + 1)));
        }
        Ok(ParamSeq { rule, pairs })
    }

    pub fn from_u64(rule: RuleTag, pairs: &[(u64, u64)]) -> Result<Self> {
        ParamSeq::new(rule, pairs.iter().map(|&(m, n)| (BigUint::from(m), BigUint::from(n))).collect())
    }

    /// Number of pairs `K`.
    pub fn depth(&self) -> usize {
        self.pairs.len()
    }

    /// `m_k` for 1-based `k`.
    pub fn m(&self, k: usize) -> &BigUint {
        &self.pairs[k - 1].0
    }

    /// `n_k` for 1-based `k`.
    pub fn n(&self, k: usize) -> &BigUint {
        &self.pairs[k - 1].1
    }

    /// `A_{m_k,n_k}` for 1-based `k`.
    pub fn matrix(&self, k: usize) -> Mat4 {
        let (m, n) = &self.pairs[k - 1];
        keane_matrix(m, n).expect("validated on construction").entries
    }

    /// `A_{m_{from+1},n_{from+1}} ... A_{m_to,n_to}` (identity when `from == to`).
    pub fn product(&self, from: usize, to: usize) -> Mat4 {
        (from + 1..=to).fold(Mat4::identity(), |acc, k| acc.mul(&self.matrix(k)))
    }

    /// The prefix of the first `k` pairs, keeping the rule tag.
    pub fn truncated(&self, k: usize) -> Result<ParamSeq> {
        if k == 0 || k > self.depth() {
            return Err(KeaneError::domain(format!("cannot truncate a depth-{} sequence to {k}", self.depth())));
        }
        Ok(ParamSeq { rule: self.rule.clone(), pairs: self.pairs[..k].to_vec() })
    }

    pub fn max_digits(&self) -> usize {
        self.pairs.iter().map(|(m, n)| m.to_string().len().max(n.to_string().len())).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| KeaneError::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamSeqWire {
    rule: String,
    pairs: Vec<[serde_json::Number; 2]>,
}

impl Serialize for ParamSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let num = |x: &BigUint| -> serde_json::Number {
            serde_json::from_str(&x.to_string()).expect("integers are valid JSON numbers")
        };
        ParamSeqWire { rule: self.rule.to_string(), pairs: self.pairs.iter().map(|(m, n)| [num(m), num(n)]).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ParamSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = ParamSeqWire::deserialize(deserializer)?;
        let rule: RuleTag = wire.rule.parse().map_err(D::Error::custom)?;
        let parse = |x: &serde_json::Number| -> std::result::Result<BigUint, D::Error> {
            x.to_string().parse::<BigUint>().map_err(|_| D::Error::custom(format!("{x} is not a nonnegative integer")))
        };
        let pairs = wire
            .pairs
            .iter()
            .map(|[m, n]| Ok((parse(m)?, parse(n)?)))
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        ParamSeq::new(rule, pairs).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Warn,
    Inconclusive,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Warn => "WARN",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityEntry {
    /// 1-based index the condition refers to.
    pub k: usize,
    pub condition: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub strict: bool,
    pub entries: Vec<AdmissibilityEntry>,
}

impl AdmissibilityReport {
    pub fn worst(&self) -> Verdict {
        self.entries.iter().map(|e| e.verdict).max().unwrap_or(Verdict::Pass)
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Pass)
    }
}

/// Checks `n_1 > 9` and `3(n_k+1) <= m_k <= (n_{k+1}+1)/2`.
///
/// In relaxed mode violations are reported as warnings: finitely many pairs
/// may break the hypotheses without affecting the limiting behaviour.
pub fn admissible(seq: &ParamSeq, strict: bool) -> AdmissibilityReport {
    let miss = if strict { Verdict::Fail } else { Verdict::Warn };
    let pick = |ok: bool| if ok { Verdict::Pass } else { miss };
    let mut entries = vec![AdmissibilityEntry {
        k: 1,
        condition: "n_1 > 9".into(),
        verdict: pick(*seq.n(1) > BigUint::from(9u32)),
    }];
    for k in 1..=seq.depth() {
        let (m, n) = (seq.m(k), seq.n(k));
        entries.push(AdmissibilityEntry {
            k,
            condition: format!("3(n_{k}+1) <= m_{k}"),
            verdict: pick(BigUint::from(3u32) * (n + 1u32) <= *m),
        });
        if k < seq.depth() {
            entries.push(AdmissibilityEntry {
                k,
                condition: format!("m_{k} <= (n_{}+1)/2", k + 1),
                verdict: pick(BigUint::from(2u32) * m <= seq.n(k + 1) + 1u32),
            });
        }
    }
    AdmissibilityReport { strict, entries }
}

pub fn uniform_seed() -> [Rational; 4] {
    std::array::from_fn(|_| crate::num::rat(1, 4))
}

fn check_simplex(v: &[Rational; 4]) -> Result<()> {
    if v.iter().any(|x| *x <= Rational::zero()) {
        return Err(KeaneError::domain("seed vector must have positive entries"));
    }
    let s: Rational = v.iter().sum();
    if !s.is_one() {
        return Err(KeaneError::domain(format!("seed vector sums to {}, not 1", fmt_rational(&s))));
    }
    Ok(())
}

pub fn normalize(v: &[Rational; 4]) -> [Rational; 4] {
    let s: Rational = v.iter().sum();
    std::array::from_fn(|i| &v[i] / &s)
}

/// Normalization of `A_{m_1,n_1} ... A_{m_K,n_K} v`.
pub fn lengths(seq: &ParamSeq, v: &[Rational; 4]) -> Result<[Rational; 4]> {
    check_simplex(v)?;
    Ok(normalize(&seq.product(0, seq.depth()).apply_rat(v)))
}

/// Return times of the four pieces of `I^(k)` to `I^(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnTimes {
    pub level: usize,
    pub b: [BigUint; 4],
}

impl ReturnTimes {
    /// `b_{k,j}` for 1-based `j`.
    pub fn get(&self, j: usize) -> &BigUint {
        &self.b[j - 1]
    }

    pub fn as_rats(&self) -> [Rational; 4] {
        std::array::from_fn(|j| uint_to_rat(&self.b[j]))
    }
}

/// `b_{k,·}` as column sums of `A_{m_1,n_1}...A_{m_k,n_k}`; `k = 0` gives ones.
pub fn return_times(seq: &ParamSeq, k: usize) -> Result<ReturnTimes> {
    if k > seq.depth() {
        return Err(KeaneError::domain(format!("level {k} exceeds sequence depth {}", seq.depth())));
    }
    Ok(ReturnTimes { level: k, b: seq.product(0, k).col_sums() })
}

/// Return times at every level `0..=K`, accumulated level by level.
pub fn all_return_times(seq: &ParamSeq) -> Vec<ReturnTimes> {
    let mut out = Vec::with_capacity(seq.depth() + 1);
    let mut b: [BigUint; 4] = std::array::from_fn(|_| BigUint::one());
    out.push(ReturnTimes { level: 0, b: b.clone() });
    for k in 1..=seq.depth() {
        b = seq.matrix(k).left_apply_int(&b);
        out.push(ReturnTimes { level: k, b: b.clone() });
    }
    out
}

/// `b_{k,2} = m_k b_{k-1,2} + n_k b_{k-1,3} + b_{k-1,4}`.
pub fn b2_recurrence(prev: &ReturnTimes, m: &BigUint, n: &BigUint) -> BigUint {
    m * prev.get(2) + n * prev.get(3) + prev.get(4)
}

/// `b_{k,3} = b_{k-1,1} + (n_k - 1) b_{k-1,3} + b_{k-1,4}`.
pub fn b3_recurrence(prev: &ReturnTimes, n: &BigUint) -> BigUint {
    prev.get(1) + (n - 1u32) * prev.get(3) + prev.get(4)
}

/// Verifies both recurrences against the column sums at every level.
pub fn check_recurrences(seq: &ParamSeq) -> Result<()> {
    let all = all_return_times(seq);
    for k in 1..=seq.depth() {
        let direct = return_times(seq, k)?;
        if direct != all[k]
            || b2_recurrence(&all[k - 1], seq.m(k), seq.n(k)) != *direct.get(2)
            || b3_recurrence(&all[k - 1], seq.n(k)) != *direct.get(3)
        {
            return Err(KeaneError::domain(format!("return-time recurrences disagree at level {k}")));
        }
    }
    Ok(())
}

/// Placement of `I^(k)` and its four named pieces inside `[0,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelGeometry {
    pub level: usize,
    pub interval: HalfOpen,
    /// Indexed by name `j - 1`.
    pub piece_left: [Rational; 4],
    pub piece_len: [Rational; 4],
}

impl LevelGeometry {
    pub fn piece(&self, j: usize) -> HalfOpen {
        HalfOpen { left: self.piece_left[j - 1].clone(), right: &self.piece_left[j - 1] + &self.piece_len[j - 1] }
    }

    /// Names of the pieces in left-to-right order.
    pub fn spatial_order(&self) -> [usize; 4] {
        if self.level % 2 == 0 {
            [1, 2, 3, 4]
        } else {
            [4, 3, 2, 1]
        }
    }

    /// Name of the piece containing `x`, if `x` lies in `I^(k)`.
    pub fn piece_of(&self, x: &Rational) -> Option<usize> {
        (1..=4).find(|&j| self.piece(j).contains(x))
    }
}

/// The exchange built from a finite parameter sequence and a seed vector,
/// with the positions of every inducing interval `I^(k)`, `k <= K`.
#[derive(Debug, Clone)]
pub struct KeaneIet {
    pub seq: ParamSeq,
    pub seed: [Rational; 4],
    pub iet: Iet,
    pub levels: Vec<LevelGeometry>,
}

impl KeaneIet {
    pub fn new(seq: &ParamSeq, seed: &[Rational; 4]) -> Result<Self> {
        check_simplex(seed)?;
        let depth = seq.depth();
        // weights[k] = A_{k+1} ... A_K v, unnormalized.
        let mut weights = vec![seed.clone(); depth + 1];
        for k in (0..depth).rev() {
            weights[k] = seq.matrix(k + 1).apply_rat(&weights[k + 1]);
        }
        let total: Rational = weights[0].iter().sum();
        let iet = Iet::new(Permutation::keane(), weights[0].iter().map(|w| w / &total).collect())?;
        let mut levels = Vec::with_capacity(depth + 1);
        let mut interval = HalfOpen::unit();
        for (k, w) in weights.iter().enumerate() {
            let piece_len: [Rational; 4] = std::array::from_fn(|j| &w[j] / &total);
            let geom = place(k, interval.clone(), piece_len);
            interval = geom.piece(4);
            levels.push(geom);
        }
        Ok(KeaneIet { seq: seq.clone(), seed: seed.clone(), iet, levels })
    }

    pub fn with_uniform_seed(seq: &ParamSeq) -> Result<Self> {
        KeaneIet::new(seq, &uniform_seed())
    }

    pub fn depth(&self) -> usize {
        self.seq.depth()
    }

    pub fn level(&self, k: usize) -> Result<&LevelGeometry> {
        self.levels
            .get(k)
            .ok_or_else(|| KeaneError::domain(format!("level {k} exceeds construction depth {}", self.depth())))
    }
}

fn place(level: usize, interval: HalfOpen, piece_len: [Rational; 4]) -> LevelGeometry {
    let order = if level % 2 == 0 { [1, 2, 3, 4] } else { [4, 3, 2, 1] };
    let mut piece_left: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
    let mut acc = interval.left.clone();
    for j in order {
        piece_left[j - 1] = acc.clone();
        acc += &piece_len[j - 1];
    }
    debug_assert_eq!(acc, interval.right);
    LevelGeometry { level, interval, piece_left, piece_len }
}

/// `Π_{i<=k} f(i)` over big integers.
pub fn prod_upto(seq: &ParamSeq, k: usize, f: impl Fn(&BigUint, &BigUint) -> BigUint) -> BigUint {
    (1..=k).map(|i| f(seq.m(i), seq.n(i))).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn u(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn rows(m: &Mat4) -> Vec<Vec<u64>> {
        m.0.iter().map(|r| r.iter().map(|x| u64::try_from(x).unwrap()).collect()).collect()
    }

    #[test]
    fn matrix_display() {
        let a = keane_matrix(&u(1), &u(1)).unwrap();
        assert_eq!(rows(&a.entries), vec![vec![0, 0, 1, 1], vec![0, 1, 0, 0], vec![1, 1, 0, 1], vec![1, 1, 1, 1]]);
        let a = keane_matrix(&u(33), &u(10)).unwrap();
        assert_eq!(rows(&a.entries)[1], vec![32, 33, 0, 0]);
        assert_eq!(rows(&a.entries)[2], vec![10, 10, 9, 10]);
        assert_eq!(a.entries.col_sums(), [u(43), u(44), u(11), u(12)]);
        assert!(keane_matrix(&u(0), &u(1)).is_err());
        assert!(keane_matrix(&u(1), &u(0)).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(33, 10), (201, 66)]).unwrap();
        assert!(admissible(&seq, true).all_hold());
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(33, 9)]).unwrap();
        let rep = admissible(&seq, true);
        assert_eq!(rep.entries[0].verdict, Verdict::Fail);
        assert_eq!(admissible(&seq, false).entries[0].verdict, Verdict::Warn);
        // single pair: only n_1 and the lower bound are checked
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(40, 12)]).unwrap();
        let rep = admissible(&seq, true);
        assert_eq!(rep.entries.len(), 2);
        assert!(rep.all_hold());
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(40, 10), (201, 66)]).unwrap();
        assert_eq!(admissible(&seq, true).worst(), Verdict::Fail);
    }

    #[test]
    fn lengths_examples() {
        let v = uniform_seed();
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(10, 3)]).unwrap();
        assert_eq!(lengths(&seq, &v).unwrap(), [rat(1, 18), rat(19, 36), rat(11, 36), rat(1, 9)]);
        for (m, n) in [(33i64, 10i64), (7, 2), (100, 31)] {
            let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(m as u64, n as u64)]).unwrap();
            let d = 2 * m + 4 * n + 4;
            assert_eq!(lengths(&seq, &v).unwrap(), [rat(2, d), rat(2 * m - 1, d), rat(4 * n - 1, d), rat(4, d)]);
        }
        assert!(lengths(&seq_1(), &[rat(1, 2), rat(1, 2), rat(0, 1), rat(0, 1)]).is_err());
        assert!(lengths(&seq_1(), &[rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]).is_err());
    }

    fn seq_1() -> ParamSeq {
        ParamSeq::from_u64(RuleTag::Explicit, &[(33, 10)]).unwrap()
    }

    #[test]
    fn empty_product_is_identity() {
        let seq = seq_1();
        assert_eq!(seq.product(1, 1), Mat4::identity());
        assert_eq!(return_times(&seq, 0).unwrap().b, [u(1), u(1), u(1), u(1)]);
    }

    #[test]
    fn return_time_examples() {
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(33, 10), (201, 66)]).unwrap();
        assert_eq!(return_times(&seq, 1).unwrap().b, [u(43), u(44), u(11), u(12)]);
        let b2 = return_times(&seq, 2).unwrap();
        assert_eq!(*b2.get(2), u(201 * 44 + 66 * 11 + 12));
        check_recurrences(&seq).unwrap();
        assert!(return_times(&seq, 3).is_err());
    }

    #[test]
    fn rule_tags_round_trip() {
        for s in ["explicit", "flip(1,1)", "flip(-,0)", "alpha2(1/2)", "alpha3(2/3)", "generic", "appendix", "minimal-admissible"] {
            let tag: RuleTag = s.parse().unwrap();
            assert_eq!(tag.to_string(), s);
        }
        assert!("flip(2,1)".parse::<RuleTag>().is_err());
        assert!("nope".parse::<RuleTag>().is_err());
    }

    #[test]
    fn json_shape() {
        let seq = ParamSeq::from_u64(RuleTag::Flip { lambda2: FlipChoice::One, lambda3: FlipChoice::One }, &[(40, 10), (640, 160)])
            .unwrap();
        let js = seq.to_json();
        assert_eq!(js, r#"{"rule":"flip(1,1)","pairs":[[40,10],[640,160]]}"#);
        assert_eq!(ParamSeq::from_json(&js).unwrap(), seq);
        assert!(ParamSeq::from_json(r#"{"rule":"explicit","pairs":[[0,10]]}"#).is_err());
        assert!(ParamSeq::from_json(r#"{"rule":"explicit","pairs":[[1,10]],"extra":1}"#).is_err());
        let big = "123456789012345678901234567890";
        let seq = ParamSeq::from_json(&format!(r#"{{"rule":"explicit","pairs":[[{big},7]]}}"#)).unwrap();
        assert_eq!(seq.m(1).to_string(), big);
    }

    #[test]
    fn level_geometry_alternates() {
        let seq = ParamSeq::from_u64(RuleTag::Explicit, &[(33, 10), (201, 66)]).unwrap();
        let k = KeaneIet::with_uniform_seed(&seq).unwrap();
        assert_eq!(k.levels[1].interval, k.iet.interval(4));
        // I^(1) pieces run 4,3,2,1 left to right; I^(2) is the leftmost.
        assert_eq!(k.levels[2].interval.left, k.levels[1].interval.left);
        assert_eq!(k.levels[1].piece_left[3], k.levels[1].interval.left);
        assert_eq!(k.levels[2].piece_left[0], k.levels[2].interval.left);
    }
}
