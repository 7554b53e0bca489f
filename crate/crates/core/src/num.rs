//! Exact-number helpers shared by every module: rationals, integer roots and
//! outward-rounded decimal rendering.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KeaneError, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn uint_to_rat(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || KeaneError::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if whole_digits.is_empty() { "0" } else { whole_digits }, frac);
        let mut p: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            p = -p;
        }
        let q = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Rational::new(p, q));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// `p/q` rendering (integers render without a denominator).
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_rat(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_rat(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// `floor(n^(1/k))`.
pub fn iroot_floor(n: &BigUint, k: u32) -> BigUint {
    n.nth_root(k)
}

/// `ceil(n^(1/k))`.
pub fn iroot_ceil(n: &BigUint, k: u32) -> BigUint {
    let f = n.nth_root(k);
    if f.pow(k) == *n {
        f
    } else {
        f + 1u32
    }
}

/// `floor(n^(1/alpha))` for rational `alpha = p/q > 0`, i.e. `floor((n^q)^(1/p))`.
pub fn floor_pow_recip(n: &BigUint, alpha: &Rational) -> Result<BigUint> {
    let (p, q) = small_ratio(alpha)?;
    Ok(iroot_floor(&n.pow(q), p))
}

/// Splits a positive rational into small `(numerator, denominator)` exponents.
pub fn small_ratio(r: &Rational) -> Result<(u32, u32)> {
    if !r.is_positive() {
        return Err(KeaneError::domain(format!("exponent must be positive, got {}", fmt_rational(r))));
    }
    let p = r.numer().to_u32();
    let q = r.denom().to_u32();
    match (p, q) {
        (Some(p), Some(q)) if p <= 1_000 && q <= 1_000 => Ok((p, q)),
        _ => Err(KeaneError::domain(format!("exponent {} has too large a numerator/denominator", fmt_rational(r)))),
    }
}

/// Rational enclosure of `n^alpha` for a nonnegative integer `n` and rational
/// `alpha >= 0` with small numerator/denominator. The enclosure width is at
/// most `2^-scale_bits` relative to the integer scale.
pub fn pow_enclosure(n: &BigUint, alpha: &Rational, scale_bits: u32) -> Result<(Rational, Rational)> {
    if alpha.is_zero() {
        return Ok((Rational::one(), Rational::one()));
    }
    let (p, q) = small_ratio(alpha)?;
    let scale = BigUint::one() << scale_bits;
    // (n^p * scale^q)^(1/q) = n^(p/q) * scale
    let inner = n.pow(p) * scale.pow(q);
    let lo = iroot_floor(&inner, q);
    let hi = iroot_ceil(&inner, q);
    let s = uint_to_rat(&scale);
    Ok((uint_to_rat(&lo) / &s, uint_to_rat(&hi) / s))
}

/// Outward-rounded scientific decimal with `digits` significant digits.
/// `round_up` selects the rounding direction.
pub fn fmt_sci(r: &Rational, digits: usize, round_up: bool) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = r.is_negative();
    let a = r.abs();
    // Decimal exponent e with 10^e <= a < 10^(e+1).
    let mut e = estimate_log10(&a);
    let ten = BigInt::from(10u32);
    loop {
        let lower = pow10(e);
        if a < lower {
            e -= 1;
            continue;
        }
        if a >= pow10(e + 1) {
            e += 1;
            continue;
        }
        break;
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    // Magnitude rounding direction flips for negatives.
    let up = round_up != neg;
    let mut m = if up { ceil_rat(&scaled) } else { floor_rat(&scaled) };
    let mut exp = e;
    if m >= ten.pow(digits as u32) {
        // Only reachable by rounding up to the next power of ten.
        m = ten.pow(digits as u32 - 1);
        exp += 1;
    }
    let ms = m.to_string();
    let (head, tail) = ms.split_at(1);
    let mantissa = if tail.is_empty() { head.to_string() } else { format!("{head}.{tail}") };
    format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, exp)
}

fn pow10(e: i64) -> Rational {
    let ten = BigInt::from(10u32);
    if e >= 0 {
        Rational::from_integer(ten.pow(e as u32))
    } else {
        Rational::new(BigInt::one(), ten.pow((-e) as u32))
    }
}

fn estimate_log10(a: &Rational) -> i64 {
    let nb = a.numer().bits() as f64;
    let db = a.denom().bits() as f64;
    ((nb - db) * std::f64::consts::LOG10_2).floor() as i64
}

/// Lossy conversion for informational output and diagnostics only.
pub fn to_f64(r: &Rational) -> f64 {
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb - db - 60).max(0) as usize;
    let dshift = (db - nb - 60).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> dshift).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi(shift as i32 - dshift as i32)
}
