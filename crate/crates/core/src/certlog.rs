//! Rational interval arithmetic with certified natural logarithms.
//!
//! `ln x` for a positive rational is computed as `e ln 2 + 2 atanh(z)` with
//! `x = 2^e y`, `y` in `[1, 2)` and `z = (y - 1)/(y + 1) < 1/3`. Series
//! terms are floored in fixed point, so the sum is a lower bound and the
//! accumulated truncation error is added to get the upper bound.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{KeaneError, Result};
use crate::num::{fmt_sci, uint_to_rat, Rational};

/// Default number of significant decimal digits carried by log evaluations.
pub const DEFAULT_DIGITS: usize = 50;

/// Working precision in bits for `digits` decimal digits.
pub fn bits_for_digits(digits: usize) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

/// A closed interval `[lo, hi]` of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(KeaneError::domain("interval with lo > hi"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        Interval {
            lo: p.iter().min().expect("four products").clone(),
            hi: p.iter().max().expect("four products").clone(),
        }
    }

    pub fn div(&self, o: &Interval) -> Result<Interval> {
        if o.contains_zero() {
            return Err(KeaneError::domain("division by an interval containing zero"));
        }
        let inv = Interval { lo: o.hi.recip(), hi: o.lo.recip() };
        Ok(self.mul(&inv))
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval { lo: (&self.lo).min(&o.lo).clone(), hi: (&self.hi).min(&o.hi).clone() }
    }

    /// Midpoint and half-width, both as outward-rounded decimals.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        let two = Rational::from_integer(BigInt::from(2));
        let mid = (&self.lo + &self.hi) / &two;
        let half = self.width() / two;
        (fmt_sci(&mid, digits, false), fmt_sci(&half, 3, true))
    }
}

fn fixed(n: BigInt, bits: u32) -> Rational {
    Rational::new(n, BigInt::one() << bits)
}

/// Enclosure of `atanh(num/den)` for `0 <= num/den <= 1/3`, in units of
/// `2^-bits`.
fn atanh_fixed(num: &BigInt, den: &BigInt, bits: u32) -> (BigInt, BigInt) {
    if num.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let scale = BigInt::one() << bits;
    let num2 = num * num;
    let den2 = den * den;
    let mut p = num.clone();
    let mut q = den.clone();
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut i = 0u64;
    loop {
        let term = (&p * &scale).div_floor(&(&q * BigInt::from(2 * i + 1)));
        terms += 1;
        if term.is_zero() {
            break;
        }
        sum += term;
        p *= &num2;
        q *= &den2;
        i += 1;
    }
    // Each floored term loses under one unit; the tail after a vanishing
    // term is a geometric series with ratio below 1/9.
    (sum.clone(), sum + BigInt::from(terms + 2))
}

fn ln2_fixed(bits: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_fixed(&BigInt::one(), &BigInt::from(3), bits);
    (lo * 2, hi * 2)
}

/// Certified enclosure of `ln x` with absolute width about `2^-bits` times
/// the binary exponent of `x`.
pub fn ln(x: &Rational, bits: u32) -> Result<Interval> {
    if !x.is_positive() {
        return Err(KeaneError::domain("logarithm of a nonpositive number"));
    }
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = Rational::from_integer(BigInt::from(2));
    let pow2 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(BigInt::one() << e as u64)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-e) as u64)
        }
    };
    let mut y = x / pow2(e);
    while y < Rational::one() {
        y *= &two;
        e -= 1;
    }
    while y >= two {
        y /= &two;
        e += 1;
    }
    // y lies in [Y, Y + 1] * 2^-bits.
    let scale = BigInt::one() << bits;
    let y_fix = (y.numer() * &scale).div_floor(y.denom());
    let ln_y = |yy: &BigInt| -> (BigInt, BigInt) {
        let (lo, hi) = atanh_fixed(&(yy - &scale), &(yy + &scale), bits);
        (lo * 2, hi * 2)
    };
    let (ylo, _) = ln_y(&y_fix);
    let (_, yhi) = ln_y(&(&y_fix + 1));
    let (l2lo, l2hi) = ln2_fixed(bits);
    let eb = BigInt::from(e);
    let (elo, ehi) = match e.cmp(&0) {
        Ordering::Less => (&eb * &l2hi, &eb * &l2lo),
        _ => (&eb * &l2lo, &eb * &l2hi),
    };
    Ok(Interval { lo: fixed(elo + ylo, bits), hi: fixed(ehi + yhi, bits) })
}

pub fn ln_uint(n: &BigUint, bits: u32) -> Result<Interval> {
    ln(&uint_to_rat(n), bits)
}

/// `ln` of every point of a positive interval.
pub fn ln_interval(x: &Interval, bits: u32) -> Result<Interval> {
    Ok(Interval { lo: ln(&x.lo, bits)?.lo, hi: ln(&x.hi, bits)?.hi })
}
