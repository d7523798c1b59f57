//! Exact square roots of rationals and finite sums of them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::number::{
    format_rational, normalize_minus, parse_rational, rational_to_f64, sign_of, sqrt_split, Rational,
};
use crate::error::{Error, Result};

/// The real number `sign * sqrt(radicand)`.
///
/// The radicand is a rational in lowest terms, so two surds are equal exactly
/// when their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    sign: i8,
    radicand: Rational,
}

impl Surd {
    pub fn zero() -> Self {
        Surd { sign: 0, radicand: Rational::zero() }
    }

    pub fn one() -> Self {
        Surd { sign: 1, radicand: Rational::one() }
    }

    pub fn new(sign: i8, radicand: Rational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Input(format!("negative radicand {radicand}")));
        }
        if !(-1..=1).contains(&sign) {
            return Err(Error::Input(format!("sign must be -1, 0 or 1, got {sign}")));
        }
        if (sign == 0) != radicand.is_zero() {
            return Err(Error::Input("sign is zero exactly when the radicand is".into()));
        }
        Ok(Surd { sign, radicand })
    }

    /// `+sqrt(q)` for `q >= 0`.
    pub fn sqrt(q: Rational) -> Result<Self> {
        let sign = sign_of(&q);
        Surd::new(sign, q)
    }

    pub fn from_rational(q: &Rational) -> Self {
        Surd { sign: sign_of(q), radicand: q * q }
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// `self^2`, always rational.
    pub fn square(&self) -> Rational {
        self.radicand.clone()
    }

    /// The value as a rational, when it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        let (coeff, s) = self.split();
        s.is_one().then_some(coeff)
    }

    /// `value = coeff * sqrt(s)` with `s` square-free; `coeff` carries the sign.
    pub fn split(&self) -> (Rational, BigUint) {
        if self.is_zero() {
            return (Rational::zero(), BigUint::one());
        }
        let (c, s) = sqrt_split(&self.radicand);
        (if self.sign < 0 { -c } else { c }, s)
    }

    pub fn abs(&self) -> Surd {
        Surd { sign: self.sign.abs(), radicand: self.radicand.clone() }
    }

    pub fn recip(&self) -> Option<Surd> {
        (!self.is_zero()).then(|| Surd { sign: self.sign, radicand: self.radicand.recip() })
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * rational_to_f64(&self.radicand).sqrt()
    }

    pub fn scale(&self, q: &Rational) -> Surd {
        self * &Surd::from_rational(q)
    }
}

impl Default for Surd {
    fn default() -> Self {
        Surd::zero()
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        Surd { sign: self.sign * rhs.sign, radicand: &self.radicand * &rhs.radicand }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { sign: -self.sign, radicand: self.radicand }
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -self.clone()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (coeff, s) = self.split();
        if s.is_one() {
            return write!(f, "{}", format_rational(&coeff));
        }
        if coeff.is_negative() {
            write!(f, "-")?;
        }
        let c = coeff.abs();
        if c.is_one() {
            write!(f, "sqrt({s})")
        } else {
            write!(f, "{}*sqrt({s})", format_rational(&c))
        }
    }
}

impl FromStr for Surd {
    type Err = Error;

    fn from_str(text: &str) -> Result<Surd> {
        let t: String = normalize_minus(text.trim());
        let bad = |why: &str| Error::parse(None, format!("bad number {text:?}: {why}"));
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, t.as_str()),
        };
        let (coeff, rad) = if let Some(pos) = body.find("sqrt(") {
            let head = body[..pos].trim_end();
            let coeff = if head.is_empty() {
                Rational::one()
            } else {
                let h = head.strip_suffix('*').ok_or_else(|| bad("expected '*' before sqrt"))?;
                let c = parse_rational(h.trim())?;
                if c.is_negative() {
                    return Err(bad("coefficient sign must be leading"));
                }
                c
            };
            let inner = body[pos + 5..].strip_suffix(')').ok_or_else(|| bad("unclosed sqrt("))?;
            let r = parse_rational(inner)?;
            if r.is_negative() {
                return Err(bad("negative radicand"));
            }
            (coeff, r)
        } else {
            let q = parse_rational(body)?;
            if q.is_negative() {
                return Err(bad("double sign"));
            }
            (q, Rational::one())
        };
        let value = Surd::sqrt(&coeff * &coeff * rad)?;
        Ok(if neg { -value } else { value })
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite sum `sum_s q_s * sqrt(s)` over square-free positive integers `s`.
///
/// Square roots of distinct square-free integers are linearly independent
/// over the rationals, so the map representation is canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SurdSum {
    terms: BTreeMap<BigUint, Rational>,
}

impl SurdSum {
    pub fn zero() -> Self {
        SurdSum::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(BigUint::one(), q);
        }
        SurdSum { terms }
    }

    pub fn from_surd(s: &Surd) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            let (c, r) = s.split();
            terms.insert(r, c);
        }
        SurdSum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational part (coefficient of `sqrt(1)`).
    pub fn rational_part(&self) -> Rational {
        self.terms.get(&BigUint::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigUint, &Rational)> {
        self.terms.iter()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| rational_to_f64(c) * rational_to_f64(&Rational::from_integer(BigInt::from(s.clone()))).sqrt())
            .sum()
    }

    fn add_term(&mut self, s: BigUint, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(s.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add_surd(&mut self, s: &Surd) {
        if !s.is_zero() {
            let (c, r) = s.split();
            self.add_term(r, c);
        }
    }

    pub fn scale(&self, q: &Rational) -> SurdSum {
        if q.is_zero() {
            return SurdSum::zero();
        }
        SurdSum { terms: self.terms.iter().map(|(s, c)| (s.clone(), c * q)).collect() }
    }
}

impl Add for &SurdSum {
    type Output = SurdSum;
    fn add(self, rhs: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }
}

impl Add for SurdSum {
    type Output = SurdSum;
    fn add(self, rhs: SurdSum) -> SurdSum {
        &self + &rhs
    }
}

impl Sub for &SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: &SurdSum) -> SurdSum {
        self + &(-rhs)
    }
}

impl Sub for SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: SurdSum) -> SurdSum {
        &self - &rhs
    }
}

impl Neg for &SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        SurdSum { terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect() }
    }
}

impl Neg for SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        -&self
    }
}

impl Mul for &SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: &SurdSum) -> SurdSum {
        let mut out = SurdSum::zero();
        for (a, p) in &self.terms {
            for (b, q) in &rhs.terms {
                // sqrt(a) sqrt(b) = g sqrt((a/g)(b/g)) for square-free a, b
                let g = a.gcd(b);
                let s = (a / &g) * (b / &g);
                let c = p * q * Rational::from_integer(BigInt::from(g));
                out.add_term(s, c);
            }
        }
        out
    }
}

impl Mul for SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: SurdSum) -> SurdSum {
        &self * &rhs
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (s, c)) in self.terms.iter().enumerate() {
            let body = if s.is_one() {
                format_rational(&c.abs())
            } else if c.abs().is_one() {
                format!("sqrt({s})")
            } else {
                format!("{}*sqrt({s})", format_rational(&c.abs()))
            };
            match (idx, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}
