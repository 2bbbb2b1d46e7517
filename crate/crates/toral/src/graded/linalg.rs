//! Dense exact matrices over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Row-major `rows × cols` matrix; a map `Q^cols → Q^rows` on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    /// Matrix with the given column vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Stack blocks vertically.
    pub fn vstack(blocks: &[QMat], cols: usize) -> Self {
        let rows: Vec<Vec<Q>> = blocks.iter().flat_map(|b| (0..b.rows).map(|i| b.row(i).to_vec())).collect();
        Self::from_rows(cols, &rows)
    }

    /// Place blocks side by side.
    pub fn hstack(blocks: &[QMat], rows: usize) -> Self {
        let cols: Vec<Vec<Q>> = blocks.iter().flat_map(|b| (0..b.cols).map(|j| b.col(j))).collect();
        Self::from_cols(rows, &cols)
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else { continue };
            self.swap_rows(r, p);
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let s = self.get(r, j);
                    if !s.is_zero() {
                        let v = self.get(i, j) - &f * s;
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the null space as column vectors.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// A basis of the column space, chosen among the columns.
    pub fn image_basis(&self) -> Vec<Vec<Q>> {
        let pivots = self.clone().rref();
        pivots.iter().map(|&c| self.col(c)).collect()
    }

    /// Some `x` with `self · x = b`.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let aug = QMat::hstack(&[self.clone(), QMat::from_cols(self.rows, &[b.to_vec()])], self.rows);
        let mut m = aug;
        let pivots = m.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = m.get(i, self.cols).clone();
        }
        Some(x)
    }
}

/// A subspace of `Q^n` kept in reduced echelon form, with projection onto a
/// chosen complement (the non-pivot coordinates).
#[derive(Clone, Debug)]
pub struct Subspace {
    n: usize,
    basis: QMat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn spanned_by(n: usize, vectors: &[Vec<Q>]) -> Self {
        let mut basis = QMat::from_rows(n, vectors);
        let pivots = basis.rref();
        let keep: Vec<Vec<Q>> = (0..pivots.len()).map(|i| basis.row(i).to_vec()).collect();
        Self { n, basis: QMat::from_rows(n, &keep), pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn vectors(&self) -> Vec<Vec<Q>> {
        (0..self.dim()).map(|i| self.basis.row(i).to_vec()).collect()
    }

    /// Complement coordinates: indices not hit by a pivot.
    pub fn free_coords(&self) -> Vec<usize> {
        (0..self.n).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// Subtract the subspace so pivot coordinates vanish.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut w = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for (x, y) in w.iter_mut().zip(self.basis.row(i)) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn abs_max(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank() {
        let m = QMat::from_rows(3, &[vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vec(&m.apply(v)));
        }
    }

    #[test]
    fn solve_consistent() {
        let m = QMat::from_rows(2, &[vec![q(1), q(1)], vec![q(1), q(-1)]]);
        let x = m.solve(&[q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let s = QMat::from_rows(2, &[vec![q(1), q(1)], vec![q(2), q(2)]]);
        assert!(s.solve(&[q(1), q(3)]).is_none());
    }

    #[test]
    fn subspace_reduction() {
        let s = Subspace::spanned_by(3, &[vec![q(1), q(1), q(0)]]);
        assert!(s.contains(&[q(2), q(2), q(0)]));
        assert!(!s.contains(&[q(1), q(0), q(0)]));
        assert_eq!(s.free_coords(), vec![1, 2]);
    }
}
