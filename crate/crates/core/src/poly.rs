//! Univariate polynomials over the rationals with Sturm-sequence root
//! counting and exact root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exactla::number::{format_rational, rational_to_f64, sign_of, Rational};

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

/// Bisection stops once an isolating interval is narrower than `2^-ISOLATION_BITS`.
pub const ISOLATION_BITS: u32 = 80;
/// Largest denominator tried when recognising a rational root.
pub const RATIONAL_ROOT_DENOM: i64 = 1_000_000;

/// One real root, either exact or bracketed by an interval that contains
/// no other root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealRoot {
    Exact(Rational),
    Isolated { lo: Rational, hi: Rational },
}

impl RealRoot {
    pub fn approx(&self) -> f64 {
        match self {
            RealRoot::Exact(q) => rational_to_f64(q),
            RealRoot::Isolated { lo, hi } => rational_to_f64(&((lo + hi) / Rational::from_integer(2.into()))),
        }
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// `a + b t`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + rational_to_f64(c))
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
        Poly::new((0..n).map(|i| get(self, i) + get(rhs, i)).collect())
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(BigInt::from(i))).collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let f = rem.last().expect("nonempty") / &lead;
            for (i, c) in d.coeffs.iter().enumerate() {
                rem[shift + i] -= &f * c;
            }
            quot[shift] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The product of the distinct irreducible factors, monic.
    pub fn squarefree(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Removes every factor `(t - r)`.
    pub fn deflate_root(&self, r: &Rational) -> Poly {
        let lin = Poly::linear(-r.clone(), Rational::one());
        let mut p = self.clone();
        while !p.is_zero() && p.eval(r).is_zero() {
            p = p.div_rem(&lin).0;
        }
        p
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let mut next = self.derivative();
        while !next.is_zero() {
            let r = seq.last().expect("nonempty").div_rem(&next).1.scale(&-Rational::one());
            seq.push(next);
            next = r;
        }
        seq
    }

    fn sign_at(&self, at: &Bound) -> i8 {
        match at {
            Bound::Finite(t) => sign_of(&self.eval(t)),
            Bound::PosInf => sign_of(&self.leading()),
            Bound::NegInf => {
                let s = sign_of(&self.leading());
                if self.degree().unwrap_or(0) % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
        }
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`.
    pub fn count_roots(&self, lo: &Bound, hi: &Bound) -> usize {
        if self.is_zero() {
            panic!("the zero polynomial has infinitely many roots");
        }
        let mut p = self.squarefree();
        for b in [lo, hi] {
            if let Bound::Finite(t) = b {
                p = p.deflate_root(t);
            }
        }
        let seq = p.sturm_sequence();
        variations(&seq, lo).saturating_sub(variations(&seq, hi))
    }

    /// Isolates every distinct real root in `(lo, hi)`, recognising rational
    /// roots exactly.
    pub fn real_roots(&self, lo: &Bound, hi: &Bound) -> Vec<RealRoot> {
        let mut p = self.squarefree();
        for b in [lo, hi] {
            if let Bound::Finite(t) = b {
                p = p.deflate_root(t);
            }
        }
        if p.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let cauchy = p.cauchy_bound();
        let lo_q = match lo {
            Bound::Finite(t) => t.clone(),
            _ => -cauchy.clone(),
        };
        let hi_q = match hi {
            Bound::Finite(t) => t.clone(),
            _ => cauchy,
        };
        let seq = p.sturm_sequence();
        let mut out = Vec::new();
        let mut stack = vec![(lo_q, hi_q)];
        let eps = Rational::new(BigInt::one(), BigInt::one() << ISOLATION_BITS);
        while let Some((a, b)) = stack.pop() {
            let n = variations(&seq, &Bound::Finite(a.clone())) - variations(&seq, &Bound::Finite(b.clone()));
            if n == 0 {
                continue;
            }
            let mid = (&a + &b) / Rational::from_integer(2.into());
            if p.eval(&mid).is_zero() {
                // keep endpoints off roots: step away until only `mid` is enclosed
                let mut delta = (&b - &a) / Rational::from_integer(4.into());
                loop {
                    let (l, r) = (&mid - &delta, &mid + &delta);
                    if !p.eval(&l).is_zero()
                        && !p.eval(&r).is_zero()
                        && variations(&seq, &Bound::Finite(l.clone())) - variations(&seq, &Bound::Finite(r.clone())) == 1
                    {
                        out.push(RealRoot::Exact(mid.clone()));
                        stack.push((a, l));
                        stack.push((r, b));
                        break;
                    }
                    delta /= Rational::from_integer(2.into());
                }
                continue;
            }
            if n == 1 {
                out.push(refine(&p, a, b, &eps));
                continue;
            }
            stack.push((mid.clone(), b));
            stack.push((a, mid));
        }
        out.sort_by(|x, y| x.approx().total_cmp(&y.approx()));
        out
    }

    /// `1 + max |a_i / a_n|`, an upper bound on root moduli.
    fn cauchy_bound(&self) -> Rational {
        let lead = self.leading();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / &lead).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        max + Rational::one()
    }
}

/// Interval endpoint for Sturm counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::PosInf => write!(f, "+inf"),
            Bound::Finite(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// Bisects a single sign-changing root of the square-free `p` in `(a, b)`.
fn refine(p: &Poly, mut a: Rational, mut b: Rational, eps: &Rational) -> RealRoot {
    let two = Rational::from_integer(2.into());
    let sa = sign_of(&p.eval(&a));
    while &(&b - &a) >= eps {
        let mid = (&a + &b) / &two;
        match sign_of(&p.eval(&mid)) {
            0 => return RealRoot::Exact(mid),
            s if s == sa => a = mid,
            _ => b = mid,
        }
    }
    match rational_in(p, &a, &b) {
        Some(q) => RealRoot::Exact(q),
        None => RealRoot::Isolated { lo: a, hi: b },
    }
}

fn variations(seq: &[Poly], at: &Bound) -> usize {
    let signs: Vec<i8> = seq.iter().map(|p| p.sign_at(at)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// A rational root of `p` inside `(a, b)` with small denominator, found from
/// the continued-fraction convergents of the midpoint.
fn rational_in(p: &Poly, a: &Rational, b: &Rational) -> Option<Rational> {
    let mid = (a + b) / Rational::from_integer(2.into());
    let limit = BigInt::from(RATIONAL_ROOT_DENOM);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut x = mid;
    loop {
        let a_i = x.floor().to_integer();
        let h2 = &a_i * &h1 + &h0;
        let k2 = &a_i * &k1 + &k0;
        if k2 > limit {
            return None;
        }
        let q = Rational::new(h2.clone(), k2.clone());
        if &q > a && &q < b && p.eval(&q).is_zero() {
            return Some(q);
        }
        let frac = &x - Rational::from_integer(a_i);
        if frac.is_zero() {
            return None;
        }
        x = frac.recip();
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let coef = format_rational(&mag);
            match i {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{coef}*")?;
                    }
                    if i == 1 {
                        write!(f, "t")?
                    } else {
                        write!(f, "t^{i}")?
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
