//! Multiplicative decomposition of positive rationals over a pairwise
//! coprime integer basis.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::number::Rational;

const SMALL_PRIMES_UP_TO: u32 = 10_000;

/// Pairwise coprime integers `atoms` (all > 1, sorted) and an exponent row per
/// input with `|values[i]| = prod_a atoms[a]^exponents[i][a]`.
///
/// Small primes are split off by trial division; whatever remains is refined
/// into a coprime basis by repeated gcd splitting.
pub fn multiplicative_atoms(values: &[Rational]) -> (Vec<BigUint>, Vec<Vec<i64>>) {
    let parts: Vec<(BigUint, BigUint)> =
        values.iter().map(|q| (q.numer().magnitude().clone(), q.denom().magnitude().clone())).collect();
    let mut atoms: Vec<BigUint> = Vec::new();
    let mut residues: Vec<BigUint> = Vec::new();
    for (n, d) in &parts {
        for x in [n, d] {
            let mut x = x.clone();
            for p in small_primes() {
                let bp = BigUint::from(p);
                if &bp * &bp > x {
                    break;
                }
                if (&x % &bp).is_zero() {
                    atoms.push(bp.clone());
                    while (&x % &bp).is_zero() {
                        x /= &bp;
                    }
                }
            }
            if !x.is_one() && !x.is_zero() {
                residues.push(x);
            }
        }
    }
    atoms.extend(coprime_base(residues));
    atoms.sort();
    atoms.dedup();
    // a residue may be a small prime that the sqrt cut-off left behind
    let atoms = coprime_base(atoms);
    let exponents = parts.iter().map(|(n, d)| {
        atoms.iter().map(|a| valuation(n, a) - valuation(d, a)).collect()
    }).collect();
    (atoms, exponents)
}

fn valuation(n: &BigUint, a: &BigUint) -> i64 {
    if n.is_zero() {
        return 0;
    }
    let mut n = n.clone();
    let mut e = 0;
    while (&n % a).is_zero() {
        n /= a;
        e += 1;
    }
    e
}

fn coprime_base(mut set: Vec<BigUint>) -> Vec<BigUint> {
    set.retain(|x| x > &BigUint::one());
    set.sort();
    set.dedup();
    'outer: loop {
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                let g = set[i].gcd(&set[j]);
                if !g.is_one() {
                    let (a, b) = (set[i].clone(), set[j].clone());
                    set.swap_remove(j);
                    set.swap_remove(i);
                    set.extend([&a / &g, &b / &g, g]);
                    set.retain(|x| x > &BigUint::one());
                    set.sort();
                    set.dedup();
                    continue 'outer;
                }
            }
        }
        return set;
    }
}

fn small_primes() -> impl Iterator<Item = u32> {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES
        .get_or_init(|| (2..=SMALL_PRIMES_UP_TO).filter(|&p| (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect())
        .iter()
        .copied()
}
