//! Ricci operator of a left-invariant metric, by the component formula and
//! independently by contracting `A·c` against `q(c)`.

use std::collections::HashMap;

use serde::Serialize;

use super::metric::{Metric, MonomialMetric};
use crate::exactla::number::rational_to_f64;
use crate::exactla::{Rational, Surd, SurdSum};
use crate::lie::StructureConstants;

/// `R[h][k] = ric_h^k`.
#[derive(Clone, Debug, PartialEq)]
pub enum RicciOperator {
    Exact(Vec<Vec<SurdSum>>),
    Numeric(Vec<Vec<f64>>),
}

impl RicciOperator {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match self {
            RicciOperator::Exact(r) => r.iter().map(|row| row.iter().map(SurdSum::to_f64).collect()).collect(),
            RicciOperator::Numeric(r) => r.clone(),
        }
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        match self {
            RicciOperator::Exact(r) => {
                r.iter().enumerate().all(|(h, row)| row.iter().enumerate().all(|(k, v)| h == k || v.is_zero()))
            }
            RicciOperator::Numeric(r) => {
                r.iter().enumerate().all(|(h, row)| row.iter().enumerate().all(|(k, v)| h == k || v.abs() <= tol))
            }
        }
    }
}

fn quarter() -> Rational {
    Rational::new(1.into(), 4.into())
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Ordered brackets `(i, j, k, c)` in both orientations.
fn ordered_entries(sc: &StructureConstants) -> Vec<(usize, usize, usize, Surd)> {
    sc.entries().flat_map(|(i, j, k, c)| [(i, j, k, c.clone()), (j, i, k, -c)]).collect()
}

/// `ric_h^k = 1/4 g^{im} g^{ln} g_{hp} c_{ilk} c_{mnp} - 1/2 g^{km} g^{jn} g_{ip} c_{hji} c_{mnp}`.
pub fn ricci_components(sc: &StructureConstants, metric: &Metric) -> RicciOperator {
    assert_eq!(sc.dim(), metric.dim(), "metric dimension");
    match metric {
        Metric::Exact(m) => RicciOperator::Exact(components_exact(sc, m)),
        Metric::Numeric(g) => RicciOperator::Numeric(components_numeric(sc, g)),
    }
}

fn components_exact(sc: &StructureConstants, m: &MonomialMetric) -> Vec<Vec<SurdSum>> {
    let n = sc.dim();
    let pi = m.perm();
    let g = m.g();
    let ginv: Vec<Surd> = (0..n).map(|a| m.inverse_entry(a)).collect();
    let mut r = vec![vec![SurdSum::zero(); n]; n];
    let entries = ordered_entries(sc);
    // first term: m = πi, n = πl, p = πh
    for (i, l, k, c) in &entries {
        if let Some((p, c2)) = sc.bracket(pi[*i], pi[*l]) {
            let h = pi[p];
            let term = &(&(&ginv[*i] * &ginv[*l]) * &g[h]) * &(c * &c2);
            r[h][*k] = &r[h][*k] + &SurdSum::from_surd(&term).scale(&quarter());
        }
    }
    // second term: m = πk, n = πj, p = πi
    for (h, j, i, c) in &entries {
        for k in 0..n {
            let c2 = sc.c(pi[k], pi[*j], pi[*i]);
            if c2.is_zero() {
                continue;
            }
            let term = &(&(&ginv[k] * &ginv[*j]) * &g[*i]) * &(c * &c2);
            r[*h][k] = &r[*h][k] - &SurdSum::from_surd(&term).scale(&half());
        }
    }
    r
}

pub(crate) fn invert_dense(g: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = g.len();
    let inv = nalgebra::DMatrix::from_fn(n, n, |i, j| g[i][j]).try_inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}

fn components_numeric(sc: &StructureConstants, g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = sc.dim();
    let ginv = invert_dense(g).expect("nondegenerate metric");
    let c = sc.tensor_f64();
    let at = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];
    // low[m][n][h] = g_{hp} c_{mnp}
    let mut low = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for h in 0..n {
                low[(a * n + b) * n + h] = (0..n).map(|p| g[h][p] * at(a, b, p)).sum();
            }
        }
    }
    // raised[i][l][h] = g^{im} g^{ln} low[m][n][h]
    let mut half_raised = vec![0.0; n * n * n];
    for a in 0..n {
        for l in 0..n {
            for h in 0..n {
                half_raised[(a * n + l) * n + h] = (0..n).map(|b| ginv[l][b] * low[(a * n + b) * n + h]).sum();
            }
        }
    }
    let mut raised = vec![0.0; n * n * n];
    for i in 0..n {
        for l in 0..n {
            for h in 0..n {
                raised[(i * n + l) * n + h] = (0..n).map(|a| ginv[i][a] * half_raised[(a * n + l) * n + h]).sum();
            }
        }
    }
    let mut r = vec![vec![0.0; n]; n];
    for h in 0..n {
        for k in 0..n {
            let mut first = 0.0;
            let mut second = 0.0;
            for i in 0..n {
                for l in 0..n {
                    first += at(i, l, k) * raised[(i * n + l) * n + h];
                    // second term: g^{km} g^{jn} g_{ip} c_{mnp} = raised[k][j=l][i]
                    second += at(h, l, i) * raised[(k * n + l) * n + i];
                }
            }
            r[h][k] = 0.25 * first - 0.5 * second;
        }
    }
    r
}

/// `<ric, A> = 1/4 sum_{ijl} (A·c)_{ijl} q(c)_{ijl}` with
/// `q(c)_{ijl} = g^{ia} g^{jb} g_{lp} c_{abp}`; `A = e^h ⊗ e_k` yields `ric_k^h`.
pub fn ricci_via_contraction(sc: &StructureConstants, metric: &Metric) -> RicciOperator {
    assert_eq!(sc.dim(), metric.dim(), "metric dimension");
    match metric {
        Metric::Exact(m) => RicciOperator::Exact(contraction_exact(sc, m)),
        Metric::Numeric(g) => RicciOperator::Numeric(contraction_numeric(sc, g)),
    }
}

fn contraction_exact(sc: &StructureConstants, m: &MonomialMetric) -> Vec<Vec<SurdSum>> {
    let n = sc.dim();
    let pi = m.perm();
    let entries = ordered_entries(sc);
    // q(c) is supported on (πa, πb, πp) for each bracket (a, b, p)
    let mut q: HashMap<(usize, usize), (usize, Surd)> = HashMap::new();
    for (a, b, p, c) in &entries {
        let (i, j, l) = (pi[*a], pi[*b], pi[*p]);
        let v = &(&(&m.inverse_entry(i) * &m.inverse_entry(j)) * &m.g()[l]) * c;
        q.insert((i, j), (l, v));
    }
    let q_at = |i: usize, j: usize, l: usize| -> Option<&Surd> {
        q.get(&(i, j)).and_then(|(t, v)| (*t == l).then_some(v))
    };
    let mut r = vec![vec![SurdSum::zero(); n]; n];
    for h in 0..n {
        for k in 0..n {
            let mut acc = SurdSum::zero();
            for (a, b, t, c) in &entries {
                // (A·c)_{ijl} = δ_{lk} c_{ijh} - δ_{ih} c_{kjl} - δ_{jh} c_{ikl}
                if *t == h {
                    if let Some(v) = q_at(*a, *b, k) {
                        acc.add_surd(&(c * v));
                    }
                }
                if *a == k {
                    if let Some(v) = q_at(h, *b, *t) {
                        acc.add_surd(&-(c * v));
                    }
                }
                if *b == k {
                    if let Some(v) = q_at(*a, h, *t) {
                        acc.add_surd(&-(c * v));
                    }
                }
            }
            r[k][h] = acc.scale(&quarter());
        }
    }
    r
}

fn contraction_numeric(sc: &StructureConstants, g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = sc.dim();
    let ginv = invert_dense(g).expect("nondegenerate metric");
    let c = sc.tensor_f64();
    let at = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];
    let mut q = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for p in 0..n {
                let v = at(a, b, p);
                if v == 0.0 {
                    continue;
                }
                for i in 0..n {
                    if ginv[i][a] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        if ginv[j][b] == 0.0 {
                            continue;
                        }
                        for l in 0..n {
                            q[(i * n + j) * n + l] += ginv[i][a] * ginv[j][b] * g[l][p] * v;
                        }
                    }
                }
            }
        }
    }
    let qa = |i: usize, j: usize, l: usize| q[(i * n + j) * n + l];
    let mut r = vec![vec![0.0; n]; n];
    for h in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    acc += at(a, b, h) * qa(a, b, k);
                    acc -= at(k, a, b) * qa(h, a, b);
                    acc -= at(a, k, b) * qa(a, h, b);
                }
            }
            r[k][h] = 0.25 * acc;
        }
    }
    r
}

/// One entry of `ric - λ id` that is not (exactly or within tolerance) zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub mode: &'static str,
    pub lambda: String,
    pub max_abs: f64,
    pub passes: bool,
    pub nonzero: Vec<ResidualEntry>,
}

/// Checks `ric = λ id`: exactly for monomial metrics, else within `tol`.
pub fn verify_einstein(sc: &StructureConstants, metric: &Metric, lambda: &Rational, tol: f64) -> ResidualReport {
    let n = sc.dim();
    let ric = ricci_components(sc, metric);
    let lam = SurdSum::from_rational(lambda.clone());
    let mut nonzero = Vec::new();
    let mut max_abs = 0.0f64;
    let mode = match &ric {
        RicciOperator::Exact(r) => {
            for h in 0..n {
                for k in 0..n {
                    let res = if h == k { &r[h][k] - &lam } else { r[h][k].clone() };
                    if !res.is_zero() {
                        max_abs = max_abs.max(res.to_f64().abs());
                        nonzero.push(ResidualEntry { row: h + 1, col: k + 1, value: res.to_string() });
                    }
                }
            }
            "exact"
        }
        RicciOperator::Numeric(r) => {
            let l = rational_to_f64(lambda);
            for h in 0..n {
                for k in 0..n {
                    let res = r[h][k] - if h == k { l } else { 0.0 };
                    max_abs = max_abs.max(res.abs());
                    if res.abs() > tol {
                        nonzero.push(ResidualEntry { row: h + 1, col: k + 1, value: format!("{res:.6e}") });
                    }
                }
            }
            "numeric"
        }
    };
    ResidualReport { mode, lambda: lambda.to_string(), max_abs, passes: nonzero.is_empty(), nonzero }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::number::{int, rat};
    use proptest::prelude::*;

    fn sc(t: &str) -> StructureConstants {
        StructureConstants::parse_tuple(t).unwrap()
    }

    const T842_117: &str = "(0,0,0,0,sqrt(5)*e^{12},sqrt(5)*e^{34},sqrt(3)*e^{15}+sqrt(7)*e^{24}+sqrt(3)*e^{36},sqrt(7)*e^{13}+sqrt(3)*e^{25}+sqrt(3)*e^{46})";

    #[test]
    fn heisenberg_orthonormal() {
        let h = sc("(0,0,e^{12})");
        let m = Metric::from_signs("+++").unwrap();
        let expect = |v: [Rational; 3]| {
            RicciOperator::Exact(
                (0..3)
                    .map(|i| (0..3).map(|j| if i == j { SurdSum::from_rational(v[i].clone()) } else { SurdSum::zero() }).collect())
                    .collect(),
            )
        };
        let want = expect([rat(-1, 2), rat(-1, 2), rat(1, 2)]);
        assert_eq!(ricci_components(&h, &m), want);
        assert_eq!(ricci_via_contraction(&h, &m), want);
    }

    #[test]
    fn abelian_is_flat() {
        let a = StructureConstants::new(3);
        let m = Metric::from_signs("+-+").unwrap();
        let zero = RicciOperator::Exact(vec![vec![SurdSum::zero(); 3]; 3]);
        assert_eq!(ricci_components(&a, &m), zero);
        assert_eq!(ricci_via_contraction(&a, &m), zero);
        assert!(verify_einstein(&a, &m, &int(0), 1e-12).passes);
    }

    #[test]
    fn orthonormal_842_117_is_einstein() {
        let a = sc(T842_117);
        let m = Metric::from_signs("++++--++").unwrap();
        let rep = verify_einstein(&a, &m, &rat(1, 2), 0.0);
        assert!(rep.passes, "{rep:?}");
        assert_eq!(ricci_via_contraction(&a, &m), ricci_components(&a, &m));
        let bad = verify_einstein(&a, &Metric::from_signs("++++++++").unwrap(), &rat(1, 2), 0.0);
        assert!(!bad.passes);
        let num = verify_einstein(&a, &m.to_numeric(), &rat(1, 2), 1e-12);
        assert!(num.passes && num.max_abs < 1e-12, "{num:?}");
    }

    #[test]
    fn off_diagonal_metric_routes_agree() {
        let a = sc(T842_117);
        let m = Metric::from_entries(
            8,
            &[
                (0, 2, Surd::from_int(3)),
                (1, 3, Surd::from_int(-2)),
                (4, 5, Surd::from_int(5)),
                (6, 6, Surd::from_int(1)),
                (7, 7, Surd::from_int(-7)),
            ],
        )
        .unwrap();
        let r1 = ricci_components(&a, &m);
        assert_eq!(r1, ricci_via_contraction(&a, &m));
        let n1 = ricci_components(&a, &m.to_numeric()).to_f64();
        let n2 = ricci_via_contraction(&a, &m.to_numeric()).to_f64();
        let e = r1.to_f64();
        for i in 0..8 {
            for j in 0..8 {
                assert!((n1[i][j] - e[i][j]).abs() < 1e-12 && (n2[i][j] - e[i][j]).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn heisenberg_dual_routes(g in proptest::collection::vec((1i64..9, 1i64..9, any::<bool>()), 3)) {
            let h = sc("(0,0,e^{12})");
            let vals: Vec<Surd> = g.iter().map(|&(a, b, neg)| Surd::from_rational(&rat(if neg { -a } else { a }, b))).collect();
            let m = Metric::Exact(MonomialMetric::diagonal(vals).unwrap());
            prop_assert_eq!(ricci_components(&h, &m), ricci_via_contraction(&h, &m));
        }

        #[test]
        fn ricci_scales_quadratically(t in 2i64..4) {
            let a = sc(T842_117);
            let m = Metric::from_signs("+-++-+-+").unwrap();
            let r = ricci_components(&a, &m);
            let rt = ricci_components(&a.scaled(&int(t)), &m);
            if let (RicciOperator::Exact(r), RicciOperator::Exact(rt)) = (r, rt) {
                for i in 0..8 {
                    for j in 0..8 {
                        prop_assert_eq!(rt[i][j].clone(), r[i][j].scale(&int(t * t)));
                    }
                }
            }
        }
    }
}
