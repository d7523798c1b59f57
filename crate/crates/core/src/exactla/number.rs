//! Rational scalars and the textual number grammar shared by files and CLI
//! output: `INT`, `INT/INT`, `sqrt(R)`, `R*sqrt(R)`, with an optional leading
//! `-`.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Trial-division bound for square extraction.
pub(crate) const TRIAL_BOUND: u64 = 1_000_000;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = normalize_minus(text.trim());
    let bad = || Error::parse(None, format!("not a rational number: {text:?}"));
    if t.is_empty() || t.chars().any(|c| c.is_whitespace()) {
        return Err(bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t.as_str(), None),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = match den {
        Some(d) => BigInt::from_str(d).map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::parse(None, format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down to avoid overflow for huge operands
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Serializes rationals in the number grammar, for `serialize_with`.
#[allow(clippy::ptr_arg)]
pub(crate) fn ser_rationals<S: serde::Serializer>(v: &Vec<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

pub(crate) fn normalize_minus(s: &str) -> String {
    s.replace('\u{2212}', "-")
}

/// Splits `n = a^2 * s` with `s` free of square factors found by trial
/// division up to [`TRIAL_BOUND`]; a leftover perfect square is absorbed too.
pub(crate) fn square_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    if let Some(v) = n.to_u64() {
        let (a, s) = square_split_u64(v);
        return (BigUint::from(a), BigUint::from(s));
    }
    let mut rest = n.clone();
    let mut a = BigUint::one();
    let mut s = BigUint::one();
    let mut p: u64 = 2;
    while p <= TRIAL_BOUND {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            a *= bp.pow(e / 2);
            if e % 2 == 1 {
                s *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        a *= r;
    } else {
        s *= rest;
    }
    (a, s)
}

fn square_split_u64(mut n: u64) -> (u64, u64) {
    let mut a = 1u64;
    let mut s = 1u64;
    let mut p = 2u64;
    while p <= TRIAL_BOUND && p.saturating_mul(p) <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        a *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = n.isqrt();
    if r * r == n {
        a *= r;
    } else {
        s *= n;
    }
    (a, s)
}

/// Writes `sqrt(q)` (q >= 0) as `coeff * sqrt(s)` with `s` a square-free
/// integer (up to the trial bound).
pub(crate) fn sqrt_split(q: &Rational) -> (Rational, BigUint) {
    let num = q.numer().magnitude() * q.denom().magnitude();
    let (a, s) = square_split(&num);
    let coeff = Rational::new(BigInt::from(a), q.denom().clone());
    (coeff, s)
}

/// Exact integer `k`-th power of a rational.
pub(crate) fn rational_pow(q: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), (-k) as usize)
    }
}

pub(crate) fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub(crate) fn sign_of(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
