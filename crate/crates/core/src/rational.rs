//! Exact rational helpers shared by the metric and bound calculators.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `2^k` as a big unsigned integer.
pub fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

/// `2^k` as a big signed integer.
pub fn pow2_int(k: usize) -> BigInt {
    BigInt::one() << k
}

/// Exact rational `num / den`.
///
/// Panics if `den` is zero.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `count / 2^k`.
pub fn dyadic(count: impl Into<BigInt>, k: usize) -> BigRational {
    BigRational::new(count.into(), pow2_int(k))
}

/// `2^e` for a possibly negative exponent.
pub fn pow2_signed(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(pow2_int(e as usize))
    } else {
        BigRational::new(BigInt::one(), pow2_int(e.unsigned_abs() as usize))
    }
}

/// Smallest integer `>= q`.
pub fn ceil(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// Ceiling of `q * n` for a non-negative rational `q`, as a `usize`.
pub fn ceil_mul(q: &BigRational, n: usize) -> usize {
    let v = ceil(&(q * BigRational::from_integer(BigInt::from(n))));
    v.to_usize().unwrap_or(0)
}

/// Decimal approximation with 12 significant digits.
pub fn to_decimal(q: &BigRational) -> String {
    let v = to_f64(q);
    if v == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.11e}", v);
    // normalise through f64 parsing so trailing zeros disappear
    let parsed: f64 = s.parse().unwrap_or(v);
    format!("{}", parsed)
}

/// Lossy conversion to `f64` that survives huge numerators and denominators.
pub fn to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num = q.numer().abs();
    let den = q.denom().abs();
    let shift = num.bits() as i64 - den.bits() as i64;
    let (n2, d2) = if shift > 0 {
        (num, den << (shift as usize))
    } else {
        (num << ((-shift) as usize), den)
    };
    let base = BigRational::new(n2, d2).to_f64().unwrap_or(f64::NAN);
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    sign * base * 2f64.powi(shift as i32)
}

/// Exact `p/q` rendering (`p` alone for integers).
pub fn to_exact(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.125` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?.abs()
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let mag = BigRational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -mag } else { mag });
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

/// Checks `value <= 2^(-rank/2)` exactly, i.e. `value^2 * 2^rank <= 1`.
pub fn le_pow2_neg_half(value: &BigRational, rank: usize) -> bool {
    if value.is_negative() {
        return true;
    }
    let sq = value * value * BigRational::from_integer(pow2_int(rank));
    sq <= BigRational::one()
}
