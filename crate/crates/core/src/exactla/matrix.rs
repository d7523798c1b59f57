//! Dense matrices over the rationals.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::number::{format_rational, int, lcm_of_denominators, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Solution set `{ particular + sum_a t_a kernel[a] }` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    /// Integer vectors with content 1, one per free column.
    pub kernel: Vec<Vec<Rational>>,
    /// Free columns of the reduced system, aligned with `kernel`.
    pub free_columns: Vec<usize>,
}

impl AffineSolution {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    /// `particular + sum_a t[a] kernel[a]`.
    pub fn point(&self, t: &[Rational]) -> Vec<Rational> {
        assert_eq!(t.len(), self.kernel.len(), "parameter count");
        let mut x = self.particular.clone();
        for (ta, k) in t.iter().zip(&self.kernel) {
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += ta * ki;
            }
        }
        x
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let r = rows.len();
        Ok(RationalMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        RationalMatrix { rows, cols, data: entries.iter().map(|&e| int(e)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RationalMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `v^T self`.
    pub fn vec_mul(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.transpose().mul_vec(v)
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_order(&order)
    }

    /// Row reduction that scans columns in `order`, so pivots land on the
    /// earliest possible columns of that order. Columns missing from `order`
    /// never become pivots.
    pub fn rref_with_order(&self, order: &[usize]) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in 0..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] *= &inv;
                }
            }
            let pivot_row = m.row(r).to_vec();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for (j, pj) in pivot_row.iter().enumerate() {
                    if !pj.is_zero() {
                        let d = &f * pj;
                        m[(i, j)] -= d;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Solves `self x = b`; `None` when inconsistent.
    pub fn solve_affine(&self, b: &[Rational]) -> Result<Option<AffineSolution>> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.solve_affine_with_order(b, &order)
    }

    /// As [`solve_affine`](Self::solve_affine), preferring pivots in the
    /// given column order (which must be a permutation of all columns).
    pub fn solve_affine_with_order(&self, b: &[Rational], order: &[usize]) -> Result<Option<AffineSolution>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (red, pivots) = aug.rref_with_order(order);
        let rank = pivots.len();
        if (rank..self.rows).any(|i| !red[(i, self.cols)].is_zero()) {
            return Ok(None);
        }
        let mut particular = vec![Rational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = red[(r, self.cols)].clone();
        }
        let free_columns: Vec<usize> = order.iter().copied().filter(|c| !pivots.contains(c)).collect();
        let kernel = free_columns
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -red[(r, f)].clone();
                }
                integer_content_one(&v)
            })
            .collect();
        Ok(Some(AffineSolution { particular, kernel, free_columns }))
    }

    /// Basis of `{x : self x = 0}`, integer-cleared with content 1.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let zero = vec![Rational::zero(); self.rows];
        self.solve_affine(&zero).expect("dimensions agree").expect("homogeneous systems are consistent").kernel
    }

    /// Basis of `{w : w self = 0}`, integer-cleared with content 1.
    pub fn left_kernel(&self) -> Vec<Vec<Rational>> {
        self.transpose().kernel()
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let d = &f * &m[(c, j)];
                    m[(i, j)] -= d;
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Result<Option<RationalMatrix>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let order: Vec<usize> = (0..n).collect();
        let (red, pivots) = aug.rref_with_order(&order);
        if pivots.len() < n {
            return Ok(None);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)].clone();
            }
        }
        Ok(Some(inv))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub fn integer_content_one(v: &[Rational]) -> Vec<Rational> {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    /// Row-major text, entries right-aligned per column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(format_rational).collect()).collect();
        let widths: Vec<usize> =
            (0..self.cols).map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::number::rat;
    use proptest::prelude::*;

    /// Rank by Bareiss fraction-free elimination on an integer-scaled copy.
    fn bareiss_rank(m: &RationalMatrix) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..m.rows())
            .map(|i| {
                let l = lcm_of_denominators(m.row(i));
                m.row(i).iter().map(|q| (q * Rational::from_integer(l.clone())).to_integer()).collect()
            })
            .collect();
        let (rows, cols) = (m.rows(), m.cols());
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in r + 1..rows {
                for j in c + 1..cols {
                    let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    a[i][j] = v / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            r += 1;
            if r == rows {
                break;
            }
        }
        r
    }

    fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
        if m.is_empty() {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for j in 0..m.len() {
            let minor: Vec<Vec<Rational>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
            let term = &m[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    pub(crate) fn m842_117() -> RationalMatrix {
        // rows ({1,2},5) ({3,4},6) ({1,5},7) ({2,4},7) ({3,6},7) ({1,3},8) ({2,5},8) ({4,6},8)
        let idx = [(1, 2, 5), (3, 4, 6), (1, 5, 7), (2, 4, 7), (3, 6, 7), (1, 3, 8), (2, 5, 8), (4, 6, 8)];
        let mut m = RationalMatrix::zeros(8, 8);
        for (r, &(i, j, k)) in idx.iter().enumerate() {
            m[(r, i - 1)] = int(-1);
            m[(r, j - 1)] = int(-1);
            m[(r, k - 1)] = int(1);
        }
        m
    }

    #[test]
    fn identity_is_reduced() {
        let (r, p) = RationalMatrix::identity(3).rref();
        assert_eq!(r, RationalMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        assert_eq!(RationalMatrix::identity(4).det().unwrap(), int(1));
    }

    #[test]
    fn root_matrix_842_117() {
        let m = m842_117();
        assert_eq!(m.rank(), 8);
        assert_eq!(m.det().unwrap(), int(9));
        assert!(m.left_kernel().is_empty());
        let ones = vec![int(1); 8];
        let sol = m.transpose().solve_affine(&ones).unwrap().unwrap();
        let expect: Vec<Rational> = [-5, -5, -3, 7, -3, 7, -3, -3].iter().map(|&v| int(v)).collect();
        assert_eq!(sol.particular, expect);
        assert_eq!(sol.dimension(), 0);
    }

    #[test]
    fn heisenberg_is_inconsistent() {
        let mt = RationalMatrix::from_i64(3, 1, &[-1, -1, 1]);
        assert!(mt.solve_affine(&[int(1), int(1), int(1)]).unwrap().is_none());
        assert!(mt.solve_affine(&[int(1)]).is_err());
    }

    #[test]
    fn zero_matrix_left_kernel() {
        let k = RationalMatrix::zeros(2, 3).left_kernel();
        assert_eq!(k, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
    }

    #[test]
    fn kernel_vectors_are_primitive() {
        let m = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 3), int(0)]]).unwrap();
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], vec![int(2), int(-3), int(0)]);
        assert_eq!(k[1], vec![int(0), int(0), int(1)]);
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec((-4i64..=4, 1i64..=3), rows * cols).prop_map(move |e| {
            // sparse-ish entries so rank deficiency shows up
            let rows_v = e
                .chunks(cols)
                .map(|r| r.iter().map(|&(n, d)| if n.abs() > 2 { int(0) } else { rat(n, d) }).collect())
                .collect();
            RationalMatrix::from_rows(rows_v).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rank_matches_fraction_free(m in arb_matrix(5, 7)) {
            prop_assert_eq!(m.rank(), bareiss_rank(&m));
            let (r, p) = m.rref();
            for (row, &c) in p.iter().enumerate() {
                prop_assert!(r[(row, c)].is_one());
            }
        }

        #[test]
        fn det_matches_cofactor(m in arb_matrix(4, 4)) {
            prop_assert_eq!(m.det().unwrap(), cofactor_det(&m.to_rows()));
            prop_assert_eq!(m.det().unwrap().is_zero(), !m.kernel().is_empty());
        }

        #[test]
        fn affine_solutions_solve(m in arb_matrix(4, 6), b in proptest::collection::vec(-3i64..=3, 4), t in proptest::collection::vec(-5i64..=5, 6)) {
            let b: Vec<Rational> = b.into_iter().map(int).collect();
            if let Some(sol) = m.solve_affine(&b).unwrap() {
                let params: Vec<Rational> = t.into_iter().take(sol.dimension()).map(int).collect();
                prop_assert_eq!(m.mul_vec(&sol.point(&params)).unwrap(), b);
            } else {
                prop_assert!(m.rank() < 4);
            }
        }
    }
}
