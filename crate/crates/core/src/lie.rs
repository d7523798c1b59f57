//! Structure constants in a nice basis, Jacobi and nilpotency checks, and
//! central series.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Rational, Surd, SurdSum};
use crate::parser::{AlgebraDocument, BracketEntry};

/// `[e_i, e_j] = c e_k` for `i < j`, 0-based. Each pair has at most one
/// target by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureConstants {
    n: usize,
    brackets: BTreeMap<(usize, usize), (usize, Surd)>,
}

/// Nonzero `sum_cyc [[e_a, e_b], e_d]` component along `e_component`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiViolation {
    pub triple: (usize, usize, usize),
    pub component: usize,
    pub residual: String,
}

/// Two brackets `[e_i, e_j1]` and `[e_i, e_j2]` landing on the same `e_k`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NiceViolation {
    pub i: usize,
    pub k: usize,
    pub partners: Vec<usize>,
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.partners.iter().map(|j| format!("[e_{},e_{j}]", self.i)).collect();
        write!(f, "{} all land on e_{}", parts.join(", "), self.k)
    }
}

impl StructureConstants {
    pub fn new(n: usize) -> Self {
        StructureConstants { n, brackets: BTreeMap::new() }
    }

    pub fn from_document(doc: &AlgebraDocument) -> Self {
        let mut sc = StructureConstants::new(doc.dimension);
        for b in &doc.brackets {
            sc.brackets.insert((b.i - 1, b.j - 1), (b.k - 1, b.coeff.clone()));
        }
        sc
    }

    /// Parses tuple notation and checks that the result is a nice nilpotent
    /// Lie algebra.
    pub fn parse_tuple(text: &str) -> Result<Self> {
        let sc = Self::from_document(&crate::parser::parse_tuple(text)?);
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_document(&self, name: Option<String>) -> AlgebraDocument {
        AlgebraDocument {
            name,
            dimension: self.n,
            brackets: self
                .brackets
                .iter()
                .map(|(&(i, j), (k, c))| BracketEntry { i: i + 1, j: j + 1, k: k + 1, coeff: c.clone() })
                .collect(),
        }
    }

    /// Jacobi, nice condition and nilpotency.
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.validate_nice().first() {
            return Err(Error::NotNice(v.to_string()));
        }
        if let Some(v) = self.jacobi_residual().first() {
            return Err(Error::Jacobi(format!(
                "triple ({},{},{}) has residual {} along e_{}",
                v.triple.0, v.triple.1, v.triple.2, v.residual, v.component
            )));
        }
        self.lower_central_series().map(|_| ())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.brackets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.brackets.is_empty()
    }

    /// `(i, j, k, c)` with `i < j`, 0-based, ordered by `(i, j)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Surd)> {
        self.brackets.iter().map(|(&(i, j), (k, c))| (i, j, *k, c))
    }

    /// `[e_i, e_j]` as `(k, c)`, honouring antisymmetry.
    pub fn bracket(&self, i: usize, j: usize) -> Option<(usize, Surd)> {
        if i < j {
            self.brackets.get(&(i, j)).cloned()
        } else {
            self.brackets.get(&(j, i)).map(|(k, c)| (*k, -c))
        }
    }

    /// `c_{ijk}` extended antisymmetrically.
    pub fn c(&self, i: usize, j: usize, k: usize) -> Surd {
        match self.bracket(i, j) {
            Some((t, c)) if t == k => c,
            _ => Surd::zero(),
        }
    }

    pub fn insert(&mut self, i: usize, j: usize, k: usize, c: Surd) -> Result<()> {
        if i.max(j).max(k) >= self.n || i == j {
            return Err(Error::Input(format!("bracket ({},{},{}) invalid in dimension {}", i + 1, j + 1, k + 1, self.n)));
        }
        let (key, c) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        if c.is_zero() {
            self.brackets.remove(&key);
            return Ok(());
        }
        if self.brackets.contains_key(&key) {
            return Err(Error::NotNice(format!("[e_{}, e_{}] assigned twice", key.0 + 1, key.1 + 1)));
        }
        self.brackets.insert(key, (k, c));
        Ok(())
    }

    pub fn remove(&mut self, i: usize, j: usize) -> Option<(usize, Surd)> {
        self.brackets.remove(&(i.min(j), i.max(j)))
    }

    /// Same algebra with a larger ambient dimension.
    pub fn with_dimension(&self, n: usize) -> Self {
        assert!(n >= self.n, "cannot shrink");
        StructureConstants { n, brackets: self.brackets.clone() }
    }

    pub fn scaled(&self, t: &Rational) -> Self {
        let s = Surd::from_rational(t);
        StructureConstants {
            n: self.n,
            brackets: self.brackets.iter().map(|(&key, (k, c))| (key, (*k, c * &s))).collect(),
        }
    }

    /// The algebra in the basis `f_{perm[i]} = e_i`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length");
        let mut out = StructureConstants::new(self.n);
        for (i, j, k, c) in self.entries() {
            out.insert(perm[i], perm[j], perm[k], c.clone()).expect("relabeling preserves validity");
        }
        out
    }

    /// Full antisymmetric tensor `C[i][j][k]` as floats, row-major.
    pub fn tensor_f64(&self) -> Vec<f64> {
        let n = self.n;
        let mut t = vec![0.0; n * n * n];
        for (i, j, k, c) in self.entries() {
            let v = c.to_f64();
            t[(i * n + j) * n + k] = v;
            t[(j * n + i) * n + k] = -v;
        }
        t
    }

    /// Every nonzero component of the cyclic Jacobi sum over `a < b < d`.
    pub fn jacobi_residual(&self) -> Vec<JacobiViolation> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for d in b + 1..n {
                    let mut acc: BTreeMap<usize, SurdSum> = BTreeMap::new();
                    for (x, y, z) in [(a, b, d), (b, d, a), (d, a, b)] {
                        let Some((k, c1)) = self.bracket(x, y) else { continue };
                        let Some((l, c2)) = self.bracket(k, z) else { continue };
                        acc.entry(l).or_default().add_surd(&(&c1 * &c2));
                    }
                    for (l, r) in acc {
                        if !r.is_zero() {
                            out.push(JacobiViolation {
                                triple: (a + 1, b + 1, d + 1),
                                component: l + 1,
                                residual: r.to_string(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Violations of "for each `(i, k)` at most one `j` with `c_{ijk} != 0`".
    pub fn validate_nice(&self) -> Vec<NiceViolation> {
        let mut by_source: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
        for (i, j, k, _) in self.entries() {
            by_source.entry((i, k)).or_default().insert(j);
            by_source.entry((j, k)).or_default().insert(i);
        }
        by_source
            .into_iter()
            .filter(|(_, js)| js.len() > 1)
            .map(|((i, k), js)| NiceViolation { i: i + 1, k: k + 1, partners: js.into_iter().map(|j| j + 1).collect() })
            .collect()
    }

    /// `[g, span{e_s : s in set}]`, a coordinate subspace in a nice basis.
    fn bracket_with_all(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.entries()
            .filter(|&(i, j, _, _)| set.contains(&i) || set.contains(&j))
            .map(|(_, _, k, _)| k)
            .collect()
    }

    /// Dimensions of `g = g^1 ⊃ g^2 = [g,g] ⊃ ...`, ending with `0`.
    pub fn lower_central_series(&self) -> Result<Vec<usize>> {
        let mut cur: BTreeSet<usize> = (0..self.n).collect();
        let mut dims = vec![self.n];
        while !cur.is_empty() {
            let next = self.bracket_with_all(&cur);
            if next.len() == cur.len() {
                return Err(Error::NotNilpotent);
            }
            dims.push(next.len());
            cur = next;
        }
        Ok(dims)
    }

    /// Dimensions of the ascending series `z_1 ⊂ z_2 ⊂ ... = g`, starting at the centre.
    pub fn upper_central_series(&self) -> Result<Vec<usize>> {
        let mut cur: BTreeSet<usize> = BTreeSet::new();
        let mut dims = Vec::new();
        while cur.len() < self.n {
            // in a nice basis, x lies in z_{k+1} iff each coordinate e_j does
            let next: BTreeSet<usize> = (0..self.n)
                .filter(|&j| (0..self.n).all(|i| self.bracket(i, j).is_none_or(|(k, _)| cur.contains(&k))))
                .collect();
            if next.len() == cur.len() {
                return Err(Error::NotNilpotent);
            }
            dims.push(next.len());
            cur = next;
        }
        Ok(dims)
    }

    /// The label prefix: lower central series dimensions without the final 0.
    pub fn lcs_label(&self) -> Result<String> {
        let dims = self.lower_central_series()?;
        Ok(dims.iter().filter(|&&d| d > 0).map(usize::to_string).collect())
    }

    /// `de^k(e_a, e_b)`-style query: the pairs `(i, j)` with `[e_i, e_j]` along `e_k`.
    pub fn incoming(&self, k: usize) -> Vec<(usize, usize, Surd)> {
        self.entries().filter(|&(_, _, t, _)| t == k).map(|(i, j, _, c)| (i, j, c.clone())).collect()
    }
}

impl fmt::Display for StructureConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parser::render_tuple(&self.to_document(None)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::number::int;
    use proptest::prelude::*;

    fn sc(t: &str) -> StructureConstants {
        StructureConstants::from_document(&crate::parser::parse_tuple(t).unwrap())
    }

    const T842_117: &str = "(0,0,0,0,sqrt(5)*e^{12},sqrt(5)*e^{34},sqrt(3)*e^{15}+sqrt(7)*e^{24}+sqrt(3)*e^{36},sqrt(7)*e^{13}+sqrt(3)*e^{25}+sqrt(3)*e^{46})";

    /// Brute-force Jacobi on the dense tensor over all ordered triples.
    fn brute_force_jacobi(s: &StructureConstants) -> bool {
        let n = s.dim();
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    for l in 0..n {
                        let mut acc = SurdSum::zero();
                        for k in 0..n {
                            acc.add_surd(&(&s.c(a, b, k) * &s.c(k, d, l)));
                            acc.add_surd(&(&s.c(b, d, k) * &s.c(k, a, l)));
                            acc.add_surd(&(&s.c(d, a, k) * &s.c(k, b, l)));
                        }
                        if !acc.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn heisenberg_and_842_117() {
        let h = sc("(0,0,e^{12})");
        assert!(h.jacobi_residual().is_empty());
        assert!(h.validate_nice().is_empty());
        let a = sc(T842_117);
        assert!(a.jacobi_residual().is_empty());
        assert!(brute_force_jacobi(&a));
        assert_eq!(a.lower_central_series().unwrap()[..3], [8, 4, 2]);
        assert_eq!(a.lcs_label().unwrap(), "842");
    }

    #[test]
    fn flipped_sign_agrees_with_brute_force() {
        let flipped = T842_117.replace("sqrt(7)*e^{24}", "-sqrt(7)*e^{24}");
        let a = sc(&flipped);
        assert_eq!(a.jacobi_residual().is_empty(), brute_force_jacobi(&a));
        let bad = sc("(0,0,0,e^{12},e^{34})");
        assert!(!brute_force_jacobi(&bad));
        let v = bad.jacobi_residual();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].triple, v[0].component, v[0].residual.as_str()), ((1, 2, 3), 5, "-1"));
    }

    #[test]
    fn nice_violation_is_reported() {
        // [e_1,e_2] and [e_1,e_3] both land on e_4
        let v = sc("(0,0,0,e^{12}+e^{13})").validate_nice();
        assert_eq!(v, vec![NiceViolation { i: 1, k: 4, partners: vec![2, 3] }]);
    }

    #[test]
    fn series() {
        let ab = StructureConstants::new(4);
        assert_eq!(ab.lower_central_series().unwrap(), vec![4, 0]);
        assert_eq!(ab.upper_central_series().unwrap(), vec![4]);
        let a384 = sc("(0,0,0,0,e^{12},e^{34},e^{13}+e^{24},e^{15}+e^{23},e^{14}+e^{36}+e^{25})");
        let _ = a384.upper_central_series().unwrap();
        let mut nonnil = StructureConstants::new(3);
        nonnil.insert(0, 1, 1, Surd::one()).unwrap();
        assert_eq!(nonnil.lower_central_series(), Err(Error::NotNilpotent));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn scaling_preserves_jacobi(t in 1i64..6, neg in any::<bool>()) {
            let t = if neg { int(-t) } else { int(t) };
            let a = sc(T842_117).scaled(&t);
            prop_assert!(a.jacobi_residual().is_empty());
            let flipped = sc(&T842_117.replace("sqrt(7)*e^{24}", "-sqrt(7)*e^{24}"));
            prop_assert_eq!(flipped.scaled(&t).jacobi_residual().len(), flipped.jacobi_residual().len());
        }
    }
}
