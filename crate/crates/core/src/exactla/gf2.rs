//! Dense bit matrices over GF(2), one `u64` word run per row.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

/// Solutions `particular + span(kernel)` of a GF(2) system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Solution {
    pub particular: Vec<bool>,
    pub kernel: Vec<Vec<bool>>,
}

impl Gf2Solution {
    /// All `2^dim` solutions in a fixed order, or `None` above `cap`.
    pub fn enumerate(&self, cap: usize) -> Option<Vec<Vec<bool>>> {
        let d = self.kernel.len();
        if d >= usize::BITS as usize || (1usize << d) > cap {
            return None;
        }
        Some(
            (0..1usize << d)
                .map(|mask| {
                    let mut v = self.particular.clone();
                    for (a, k) in self.kernel.iter().enumerate() {
                        if mask >> a & 1 == 1 {
                            xor_into(&mut v, k);
                        }
                    }
                    v
                })
                .collect(),
        )
    }
}

fn xor_into(v: &mut [bool], k: &[bool]) {
    for (x, y) in v.iter_mut().zip(k) {
        *x ^= *y;
    }
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        Gf2Matrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        let w = &mut self.data[i * self.words + j / 64];
        if bit {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            let s = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[bool]) -> Result<Vec<bool>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| (0..self.cols).filter(|&j| v[j] && self.get(i, j)).count() % 2 == 1).collect())
    }

    /// In-place reduced row-echelon form; returns pivot columns among the
    /// first `limit` columns.
    fn reduce(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else { continue };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce(self.cols).len()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    /// Solves `self x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[bool]) -> Result<Option<Gf2Solution>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.reduce(self.cols);
        if (pivots.len()..self.rows).any(|i| aug.get(i, self.cols)) {
            return Ok(None);
        }
        let mut particular = vec![false; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = aug.get(r, self.cols);
        }
        let kernel = (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = vec![false; self.cols];
                v[f] = true;
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = aug.get(r, f);
                }
                v
            })
            .collect();
        Ok(Some(Gf2Solution { particular, kernel }))
    }

    /// Whether `v` lies in the column space.
    pub fn in_image(&self, v: &[bool]) -> Result<bool> {
        Ok(self.solve(v)?.is_some())
    }

    pub fn kernel(&self) -> Vec<Vec<bool>> {
        self.solve(&vec![false; self.rows]).expect("dimensions agree").expect("homogeneous").kernel
    }

    /// Determinant over GF(2) of a square matrix.
    pub fn det(&self) -> Result<bool> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        Ok(self.rank() == self.rows)
    }

    pub fn row_bits(&self, i: usize) -> Vec<bool> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<&str> = (0..self.cols).map(|j| if self.get(i, j) { "1" } else { "0" }).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Rank by brute force: size of the row span.
    fn span_rank(m: &Gf2Matrix) -> usize {
        let mut span = std::collections::HashSet::new();
        span.insert(vec![false; m.cols()]);
        for i in 0..m.rows() {
            let r = m.row_bits(i);
            let more: Vec<Vec<bool>> = span
                .iter()
                .map(|v: &Vec<bool>| v.iter().zip(&r).map(|(a, b)| a ^ b).collect())
                .collect();
            span.extend(more);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn zero_vector_is_always_in_image() {
        let m = Gf2Matrix::zeros(3, 2);
        assert!(m.in_image(&[false; 3]).unwrap());
        assert!(!m.in_image(&[true, false, false]).unwrap());
        assert!(m.in_image(&[true]).is_err());
    }

    #[test]
    fn wide_matrices_span_words() {
        let mut m = Gf2Matrix::zeros(2, 130);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(1, 129, true);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.kernel().len(), 128);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rank_and_solutions(bits in proptest::collection::vec(any::<bool>(), 6 * 5), b in proptest::collection::vec(any::<bool>(), 6)) {
            let rows: Vec<Vec<bool>> = bits.chunks(5).map(<[bool]>::to_vec).collect();
            let m = Gf2Matrix::from_rows(&rows).unwrap();
            prop_assert_eq!(m.rank(), span_rank(&m));
            prop_assert_eq!(m.rank(), m.transpose().rank());
            match m.solve(&b).unwrap() {
                Some(sol) => {
                    for x in sol.enumerate(64).unwrap() {
                        prop_assert_eq!(m.mul_vec(&x).unwrap(), b.clone());
                    }
                }
                None => prop_assert!(m.rank() < 6),
            }
        }
    }
}
