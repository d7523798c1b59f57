//! Metric tensors: exact monomial ones, numeric dense ones, and the
//! σ-diagonal family `g = sum_i g_i e^i ⊗ e^{σ_i}`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::diagram::Involution;
use crate::error::{Error, Result};
use crate::exactla::Surd;

/// An exact value or a float, printed in the number grammar or as a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Surd),
    Approx(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(s) => s.to_f64(),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn signum(&self) -> i8 {
        match self {
            Scalar::Exact(s) => s.sign(),
            Scalar::Approx(x) if *x > 0.0 => 1,
            Scalar::Approx(x) if *x < 0.0 => -1,
            Scalar::Approx(_) => 0,
        }
    }

    pub fn as_exact(&self) -> Option<&Surd> {
        match self {
            Scalar::Exact(s) => Some(s),
            Scalar::Approx(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(s) => write!(f, "{s}"),
            Scalar::Approx(x) => write!(f, "{x:.15e}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `G[i][perm[i]] = g[i]`, all other entries zero. Symmetry forces `perm` to
/// be an involution with `g` constant on its cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMetric {
    perm: Vec<usize>,
    g: Vec<Surd>,
}

impl MonomialMetric {
    pub fn new(perm: Vec<usize>, g: Vec<Surd>) -> Result<Self> {
        let n = perm.len();
        if g.len() != n {
            return Err(Error::Dimension(format!("{} metric entries for {n} nodes", g.len())));
        }
        Involution::from_perm(perm.clone())?;
        for i in 0..n {
            if g[i].is_zero() {
                return Err(Error::DegenerateMetric(format!("g_{} = 0", i + 1)));
            }
            if g[i] != g[perm[i]] {
                return Err(Error::Input(format!("asymmetric metric: entries ({},{}) differ", i + 1, perm[i] + 1)));
            }
        }
        Ok(MonomialMetric { perm, g })
    }

    pub fn diagonal(g: Vec<Surd>) -> Result<Self> {
        Self::new((0..g.len()).collect(), g)
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn g(&self) -> &[Surd] {
        &self.g
    }

    /// `g^{a perm[a]} = 1/g_a`.
    pub fn inverse_entry(&self, a: usize) -> Surd {
        self.g[a].recip().expect("nondegenerate")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][self.perm[i]] = self.g[i].to_f64();
        }
        m
    }
}

/// Any symmetric metric, exact when its pattern is monomial.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Exact(MonomialMetric),
    Numeric(Vec<Vec<f64>>),
}

impl Metric {
    pub fn dim(&self) -> usize {
        match self {
            Metric::Exact(m) => m.dim(),
            Metric::Numeric(m) => m.len(),
        }
    }

    /// Builds a metric from upper- or lower-triangle entries `(i, j, value)`,
    /// 0-based. Monomial patterns stay exact.
    pub fn from_entries(n: usize, entries: &[(usize, usize, Surd)]) -> Result<Self> {
        let mut dense: Vec<Vec<Option<Surd>>> = vec![vec![None; n]; n];
        for (i, j, v) in entries {
            if *i >= n || *j >= n {
                return Err(Error::Input(format!("metric entry ({},{}) outside dimension {n}", i + 1, j + 1)));
            }
            for (a, b) in [(*i, *j), (*j, *i)] {
                match &dense[a][b] {
                    Some(old) if old != v => {
                        return Err(Error::Input(format!("asymmetric metric at ({},{})", a + 1, b + 1)))
                    }
                    _ => dense[a][b] = Some(v.clone()),
                }
            }
        }
        let nonzero: Vec<Vec<usize>> =
            dense.iter().map(|r| (0..n).filter(|&j| r[j].as_ref().is_some_and(|v| !v.is_zero())).collect()).collect();
        if nonzero.iter().all(|r| r.len() == 1) {
            let perm: Vec<usize> = nonzero.iter().map(|r| r[0]).collect();
            if Involution::from_perm(perm.clone()).is_ok() {
                let g = (0..n).map(|i| dense[i][perm[i]].clone().expect("nonzero")).collect();
                return Ok(Metric::Exact(MonomialMetric::new(perm, g)?));
            }
        }
        let m: Vec<Vec<f64>> =
            dense.iter().map(|r| r.iter().map(|v| v.as_ref().map_or(0.0, Surd::to_f64)).collect()).collect();
        if crate::einstein::ricci::invert_dense(&m).is_none() {
            return Err(Error::DegenerateMetric("singular metric matrix".into()));
        }
        Ok(Metric::Numeric(m))
    }

    /// Orthonormal diagonal metric from a `++--` string.
    pub fn from_signs(signs: &str) -> Result<Self> {
        let g = signs
            .chars()
            .map(|c| match c {
                '+' => Ok(Surd::one()),
                '-' | '\u{2212}' => Ok(-Surd::one()),
                _ => Err(Error::Input(format!("bad sign character {c:?} in {signs:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Metric::Exact(MonomialMetric::diagonal(g)?))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        match self {
            Metric::Exact(m) => m.to_dense(),
            Metric::Numeric(m) => m.clone(),
        }
    }

    /// Same tensor evaluated in floating point.
    pub fn to_numeric(&self) -> Metric {
        Metric::Numeric(self.to_dense())
    }

    /// `-g`, turning `ric = λ id` into `ric = -λ id`.
    pub fn negated(&self) -> Metric {
        match self {
            Metric::Exact(m) => Metric::Exact(MonomialMetric {
                perm: m.perm.clone(),
                g: m.g.iter().map(|x| -x).collect(),
            }),
            Metric::Numeric(m) => Metric::Numeric(m.iter().map(|r| r.iter().map(|x| -x).collect()).collect()),
        }
    }

    /// Counts of positive and negative eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        match self {
            Metric::Exact(m) => monomial_signature(&m.perm, &m.g.iter().map(Surd::sign).collect::<Vec<_>>()),
            Metric::Numeric(m) => dense_signature(m),
        }
    }
}

fn monomial_signature(perm: &[usize], signs: &[i8]) -> (usize, usize) {
    let (mut p, mut q) = (0, 0);
    for i in 0..perm.len() {
        if perm[i] == i {
            if signs[i] > 0 {
                p += 1;
            } else {
                q += 1;
            }
        } else if i < perm[i] {
            // [[0, g], [g, 0]] has eigenvalues ±g
            p += 1;
            q += 1;
        }
    }
    (p, q)
}

fn dense_signature(m: &[Vec<f64>]) -> (usize, usize) {
    let n = m.len();
    let eig = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let p = eig.eigenvalues.iter().filter(|&&x| x > 1e-12 * scale).count();
    let q = eig.eigenvalues.iter().filter(|&&x| x < -1e-12 * scale).count();
    (p, q)
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricValues {
    Exact(Vec<Surd>),
    Numeric(Vec<f64>),
}

/// `g = sum_i g_i e^i ⊗ e^{σ_i}` with `g_i = g_{σ_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaDiagonalMetric {
    pub sigma: Involution,
    pub values: MetricValues,
}

impl SigmaDiagonalMetric {
    pub fn new(sigma: Involution, values: MetricValues) -> Result<Self> {
        let n = sigma.len();
        let signs: Vec<i8> = match &values {
            MetricValues::Exact(g) => {
                if g.len() != n {
                    return Err(Error::Dimension(format!("{} values for {n} nodes", g.len())));
                }
                if (0..n).any(|i| g[i] != g[sigma.apply(i)]) {
                    return Err(Error::Input("metric values are not σ-invariant".into()));
                }
                g.iter().map(Surd::sign).collect()
            }
            MetricValues::Numeric(g) => {
                if g.len() != n {
                    return Err(Error::Dimension(format!("{} values for {n} nodes", g.len())));
                }
                if (0..n).any(|i| g[i] != g[sigma.apply(i)]) {
                    return Err(Error::Input("metric values are not σ-invariant".into()));
                }
                g.iter().map(|x| if *x > 0.0 { 1 } else if *x < 0.0 { -1 } else { 0 }).collect()
            }
        };
        if let Some(i) = signs.iter().position(|&s| s == 0) {
            return Err(Error::DegenerateMetric(format!("g_{} = 0", i + 1)));
        }
        Ok(SigmaDiagonalMetric { sigma, values })
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn value(&self, i: usize) -> Scalar {
        match &self.values {
            MetricValues::Exact(g) => Scalar::Exact(g[i].clone()),
            MetricValues::Numeric(g) => Scalar::Approx(g[i]),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, MetricValues::Exact(_))
    }

    pub fn to_metric(&self) -> Metric {
        let perm = self.sigma.as_slice().to_vec();
        match &self.values {
            MetricValues::Exact(g) => Metric::Exact(MonomialMetric::new(perm, g.clone()).expect("validated")),
            MetricValues::Numeric(g) => {
                let n = g.len();
                let mut m = vec![vec![0.0; n]; n];
                for i in 0..n {
                    m[i][perm[i]] = g[i];
                }
                Metric::Numeric(m)
            }
        }
    }

    /// Fixed points contribute `sign(g_i)`, each 2-cycle `(1, 1)`.
    pub fn signature(&self) -> (usize, usize) {
        let signs: Vec<i8> = (0..self.dim()).map(|i| self.value(i).signum()).collect();
        monomial_signature(self.sigma.as_slice(), &signs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::number::rat;

    #[test]
    fn signatures() {
        assert_eq!(Metric::from_signs("++++--++").unwrap().signature(), (6, 2));
        assert_eq!(Metric::from_signs("+++").unwrap().signature(), (3, 0));
        let sigma = Involution::parse("(1,3)(2,4)(5,6)", 8).unwrap();
        let v = |q| Surd::from_rational(&q);
        let g = vec![
            v(rat(-7, 15)),
            v(rat(-7, 15)),
            v(rat(-7, 15)),
            v(rat(-7, 15)),
            v(rat(-49, 45)),
            v(rat(-49, 45)),
            v(rat(-343, 225)),
            v(rat(-343, 225)),
        ];
        let m = SigmaDiagonalMetric::new(sigma, MetricValues::Exact(g)).unwrap();
        assert_eq!(m.signature(), (3, 5));
        assert_eq!(m.to_metric().signature(), (3, 5));
        assert_eq!(m.to_metric().to_numeric().signature(), (3, 5));
    }

    #[test]
    fn entries_classify() {
        let one = Surd::one();
        let m = Metric::from_entries(2, &[(0, 1, one.clone())]).unwrap();
        assert!(matches!(m, Metric::Exact(_)));
        assert_eq!(m.signature(), (1, 1));
        let dense = Metric::from_entries(2, &[(0, 0, one.clone()), (0, 1, one.clone()), (1, 1, Surd::from_int(2))]).unwrap();
        assert!(matches!(dense, Metric::Numeric(_)));
        assert_eq!(dense.signature(), (2, 0));
        assert!(Metric::from_entries(2, &[(0, 0, one.clone()), (0, 1, one.clone()), (1, 1, one)]).is_err());
    }
}
