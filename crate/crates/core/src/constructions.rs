//! Contraction limits, one-bracket central extensions and the extension
//! tower built from them.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::diagram::build_diagram;
use crate::einstein::{solve_diagonal, solve_k, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::exactla::{Rational, Surd, SurdSum};
use crate::lie::StructureConstants;

/// Deletes every bracket whose `x_I` vanishes. `x` must solve `ᵗM X = [1]`.
pub fn contraction_limit(sc: &StructureConstants, x: &[Rational]) -> Result<StructureConstants> {
    let d = build_diagram(sc)?;
    let rm = d.root_matrix();
    if x.len() != rm.rows() {
        return Err(Error::Input(format!("X has {} entries, the index set {}", x.len(), rm.rows())));
    }
    let lhs = rm.rational().transpose().mul_vec(x)?;
    if lhs.iter().any(|v| *v != Rational::from_integer(1.into())) {
        return Err(Error::Input("X does not solve ᵗM X = [1]".into()));
    }
    let mut out = sc.clone();
    for (e, xi) in d.index_set().iter().zip(x) {
        if xi.is_zero() {
            out.remove(e.i, e.j);
        }
    }
    Ok(out)
}

/// `de^{ij}` as a 3-form, keyed by sorted triples.
fn d_of_wedge(sc: &StructureConstants, i: usize, j: usize) -> BTreeMap<[usize; 3], SurdSum> {
    let mut form: BTreeMap<[usize; 3], SurdSum> = BTreeMap::new();
    let mut add = |mut idx: [usize; 3], c: Surd| {
        // sign of the sorting permutation
        let mut sign = 1;
        for a in 0..3 {
            for b in a + 1..3 {
                if idx[a] > idx[b] {
                    sign = -sign;
                }
            }
        }
        if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
            return;
        }
        idx.sort();
        let c = if sign < 0 { -c } else { c };
        form.entry(idx).or_insert_with(SurdSum::zero).add_surd(&c);
    };
    // de^{ij} = de^i ∧ e^j - e^i ∧ de^j, up to one global sign
    for (a, b, k, c) in sc.entries() {
        if k == i {
            add([a, b, j], c.clone());
        }
        if k == j {
            add([i, a, b], -c.clone());
        }
    }
    form.retain(|_, v| !v.is_zero());
    form
}

/// Adds a node `r = n` with `de^r = e^{ij}`, i.e. `[e_i, e_j] = e_r`.
pub fn one_bracket_extension(sc: &StructureConstants, i: usize, j: usize) -> Result<StructureConstants> {
    let n = sc.dim();
    if i >= n || j >= n || i == j {
        return Err(Error::Input(format!("({}, {}) is not a pair of distinct nodes in dimension {n}", i + 1, j + 1)));
    }
    if let Some((k, _)) = sc.bracket(i, j) {
        return Err(Error::Precondition(format!("[e_{}, e_{}] = e_{} is nonzero", i + 1, j + 1, k + 1)));
    }
    let form = d_of_wedge(sc, i, j);
    if let Some((idx, _)) = form.iter().next() {
        return Err(Error::Precondition(format!(
            "e^{{{}{}}} is not closed: d e^{{{}{}}} has an e^{{{},{},{}}} component",
            i + 1,
            j + 1,
            i + 1,
            j + 1,
            idx[0] + 1,
            idx[1] + 1,
            idx[2] + 1
        )));
    }
    let mut out = sc.with_dimension(n + 1);
    out.insert(i, j, n, Surd::one())?;
    out.validate()?;
    Ok(out)
}

/// The highest node `r` hit by exactly one bracket and never a source; the
/// quotient by `e_r` undoes a one-bracket extension.
pub fn is_one_bracket_extension(sc: &StructureConstants) -> Option<(StructureConstants, usize)> {
    let n = sc.dim();
    let r = (0..n).rev().find(|&r| {
        sc.incoming(r).len() == 1 && sc.entries().all(|(i, j, _, _)| i != r && j != r)
    })?;
    let shift = |a: usize| if a > r { a - 1 } else { a };
    let mut out = StructureConstants::new(n - 1);
    for (i, j, k, c) in sc.entries() {
        if k != r {
            out.insert(shift(i), shift(j), shift(k), c.clone()).expect("quotient keeps brackets valid");
        }
    }
    Some((out, r))
}

/// One level of [`extension_tower`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerLevel {
    pub level: usize,
    /// `(anchor, partner)`, 1-based, of the bracket added at this level.
    pub extension: (usize, usize),
    #[serde(serialize_with = "ser_display")]
    pub algebra: StructureConstants,
    /// Set when the unique `X` had zeros and the solver ran on the limit.
    #[serde(serialize_with = "ser_display_opt")]
    pub contracted: Option<StructureConstants>,
    pub report: SolveReport,
}

fn ser_display<S: serde::Serializer>(v: &StructureConstants, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_display_opt<S: serde::Serializer>(v: &Option<StructureConstants>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(sc) => s.collect_str(sc),
        None => s.serialize_none(),
    }
}

/// Repeated extensions `de^{new} = e^{anchor} ∧ e^{partner}`: the first
/// partner is given, later ones are the node added just before. Every level
/// must have a square root matrix invertible over GF(2).
pub fn extension_tower(
    sc: &StructureConstants,
    anchor: usize,
    first_partner: usize,
    depth: usize,
    opts: &SolveOptions,
) -> Result<Vec<TowerLevel>> {
    let mut levels = Vec::with_capacity(depth);
    let mut current = sc.clone();
    let mut partner = first_partner;
    for level in 1..=depth {
        let at = |e: Error| match e {
            Error::Precondition(msg) => Error::Precondition(format!("tower level {level}: {msg}")),
            other => Error::Precondition(format!("tower level {level}: {other}")),
        };
        let next = one_bracket_extension(&current, anchor, partner).map_err(at)?;
        let rm = build_diagram(&next).map_err(at)?.root_matrix();
        let invertible = rm.rows() == rm.cols() && rm.gf2().det().map_err(at)?;
        if !invertible {
            return Err(at(Error::Precondition("root matrix is not invertible over GF(2)".into())));
        }
        let x = solve_k(&rm, opts.flavor).expect("invertible root matrix").particular;
        let contracted =
            if x.iter().any(Zero::is_zero) { Some(contraction_limit(&next, &x).map_err(at)?) } else { None };
        let report = solve_diagonal(contracted.as_ref().unwrap_or(&next), opts)?;
        levels.push(TowerLevel { level, extension: (anchor + 1, partner + 1), algebra: next.clone(), contracted, report });
        partner = next.dim() - 1;
        current = next;
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einstein::Flavor;

    const A842_117: &str = "(0,0,0,0,e^{12},e^{34},e^{15}+e^{24}+e^{36},e^{13}+e^{25}+e^{46})";

    fn sc(t: &str) -> StructureConstants {
        StructureConstants::parse_tuple(t).unwrap()
    }

    #[test]
    fn abelian_plane_extends_to_heisenberg() {
        let h = one_bracket_extension(&sc("(0,0)"), 0, 1).unwrap();
        assert_eq!(h, sc("(0,0,e^{12})"));
        let (q, r) = is_one_bracket_extension(&h).unwrap();
        assert_eq!((q, r), (sc("(0,0)"), 2));
    }

    #[test]
    fn preconditions_name_the_failure() {
        let a = sc(A842_117);
        let err = one_bracket_extension(&a, 0, 1).unwrap_err().to_string();
        assert!(err.contains("nonzero"), "{err}");
        // d e^{17} = -e^1 ∧ (e^{15} + e^{24} + e^{36}) has an e^{124} term
        let err = one_bracket_extension(&a, 0, 6).unwrap_err().to_string();
        assert!(err.contains("not closed"), "{err}");
    }

    #[test]
    fn extension_then_quotient_is_identity() {
        let a = sc(A842_117);
        let b = one_bracket_extension(&a, 0, 3).unwrap();
        assert_eq!(b.dim(), 9);
        assert!(b.jacobi_residual().is_empty());
        assert_eq!(is_one_bracket_extension(&b), Some((a, 8)));
    }

    #[test]
    fn gf2_rank_grows_by_one() {
        let a = sc(A842_117);
        let before = build_diagram(&a).unwrap().root_matrix().gf2().rank();
        let b = one_bracket_extension(&a, 0, 3).unwrap();
        assert_eq!(build_diagram(&b).unwrap().root_matrix().gf2().rank(), before + 1);
    }

    #[test]
    fn contraction_is_identity_without_zeros() {
        let a = sc(A842_117);
        let rm = build_diagram(&a).unwrap().root_matrix();
        let x = solve_k(&rm, Flavor::Einstein).unwrap().particular;
        assert_eq!(contraction_limit(&a, &x).unwrap(), a);
        let mut wrong = x.clone();
        wrong[0] += Rational::from_integer(1.into());
        assert!(contraction_limit(&a, &wrong).is_err());
    }

    #[test]
    fn empty_tower() {
        assert!(extension_tower(&sc(A842_117), 0, 3, 0, &SolveOptions::default()).unwrap().is_empty());
    }
}
